#include "vvec/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace vvec::timeseries {

HistogramSpec HistogramSpec::defaults() {
    HistogramSpec s;
    for (int i = 0; i <= 16; ++i) s.speed_edges.push_back(i * 10.0);
    for (int i = 0; i <= 24; ++i) s.heading_edges.push_back(i * 15.0);
    return s;
}

void HistogramSpec::validate() const {
    auto check = [](const std::vector<double>& e, const char* what) {
        if (e.size() < 2) throw ConfigError(std::string(what) + " needs >= 2 bin edges");
        for (size_t i = 1; i < e.size(); ++i)
            if (e[i] <= e[i - 1])
                throw ConfigError(std::string(what) + " bin edges must be strictly increasing");
    };
    check(speed_edges, "speed histogram");
    check(heading_edges, "heading histogram");
}

std::pair<std::optional<double>, double> circular_mean(const std::vector<double>& headings_deg) {
    if (headings_deg.empty()) throw ConfigError("circular_mean of empty set");
    double sx = 0.0, sy = 0.0;
    for (double h : headings_deg) {
        double r = h * M_PI / 180.0;
        sx += std::cos(r);
        sy += std::sin(r);
    }
    sx /= headings_deg.size();
    sy /= headings_deg.size();
    double resultant = std::hypot(sx, sy);
    if (resultant < 1e-9) return {std::nullopt, resultant};
    double mean = std::atan2(sy, sx) * 180.0 / M_PI;
    return {wrap_deg_360(mean), resultant};
}

namespace {

int bin_index(const std::vector<double>& edges, double v) {
    if (v < edges.front() || v >= edges.back()) return -1;
    auto it = std::upper_bound(edges.begin(), edges.end(), v);
    return static_cast<int>(it - edges.begin()) - 1;
}

std::string date_of(const std::string& iso) {
    // ISO-8601 UTC timestamps: the date is the first 10 characters.
    if (iso.size() < 10) return {};
    return iso.substr(0, 10);
}

}  // namespace

SeriesTable aggregate(const std::vector<vectorize::Detection>& detections,
                      const HistogramSpec& spec) {
    spec.validate();
    SeriesTable table;
    std::map<std::string, DayRow> days;
    std::map<std::string, std::set<std::string>> scenes_per_day;
    std::map<std::string, std::vector<double>> speeds, headings;

    for (const auto& d : detections) {
        std::string date = date_of(d.timestamp);
        if (date.empty()) {
            ++table.rejected_no_timestamp;
            continue;
        }
        DayRow& row = days[date];
        if (row.date.empty()) {
            row.date = date;
            row.speed_hist.assign(spec.speed_edges.size() - 1, 0);
            row.heading_hist.assign(spec.heading_edges.size() - 1, 0);
        }
        ++row.counts[d.cls];
        ++row.total;
        scenes_per_day[date].insert(d.scene_id);
        if (d.velocity && d.velocity->confidence == vectorize::HeadingConfidence::Resolved) {
            speeds[date].push_back(d.velocity->speed.speed_kmh);
            headings[date].push_back(d.velocity->heading_deg);
            int sb = bin_index(spec.speed_edges, d.velocity->speed.speed_kmh);
            if (sb >= 0) ++row.speed_hist[sb];
            int hb = bin_index(spec.heading_edges, wrap_deg_360(d.velocity->heading_deg));
            if (hb >= 0) ++row.heading_hist[hb];
        }
    }

    for (auto& [date, row] : days) {
        row.scene_count = static_cast<int>(scenes_per_day[date].size());
        if (!speeds[date].empty()) {
            double sum = 0.0;
            for (double s : speeds[date]) sum += s;
            row.mean_speed_kmh = sum / speeds[date].size();
        }
        if (!headings[date].empty()) {
            auto [mean, resultant] = circular_mean(headings[date]);
            row.mean_heading_deg = mean;
            row.heading_resultant = resultant;
        }
        table.rows.push_back(std::move(row));
    }
    // std::map iteration gives date-sorted rows already.
    return table;
}

void volume_anomaly(SeriesTable& table, int window, double z_thresh) {
    if (window < 3) throw ConfigError("volume_anomaly window must be >= 3");
    for (auto& row : table.rows) row.anomaly = false;
    if (static_cast<int>(table.rows.size()) <= window) {
        std::fprintf(stderr, "warning: series shorter than window (%d rows); no anomaly flags\n",
                     static_cast<int>(table.rows.size()));
        return;
    }
    for (size_t i = window; i < table.rows.size(); ++i) {
        double mean = 0.0;
        for (size_t j = i - window; j < i; ++j) mean += table.rows[j].total;
        mean /= window;
        double var = 0.0;
        for (size_t j = i - window; j < i; ++j) {
            double d = table.rows[j].total - mean;
            var += d * d;
        }
        double sd = std::sqrt(var / window);
        double dev = std::abs(table.rows[i].total - mean);
        // Flat trailing window: any change is an anomaly; no change is not.
        if (dev >= z_thresh * std::max(sd, 1e-9) && dev > 1e-9) table.rows[i].anomaly = true;
    }
}

std::string to_csv(const SeriesTable& table) {
    std::set<std::string> classes;
    for (const auto& row : table.rows)
        for (const auto& [cls, n] : row.counts) classes.insert(cls);

    std::ostringstream os;
    os << "date,total";
    for (const auto& cls : classes) os << ",count_" << cls;
    os << ",mean_speed_kmh,mean_heading_deg,heading_resultant,scene_count,anomaly\n";
    for (const auto& row : table.rows) {
        os << row.date << ',' << row.total;
        for (const auto& cls : classes)
            os << ',' << (row.counts.count(cls) ? row.counts.at(cls) : 0);
        os << ',';
        if (row.mean_speed_kmh) os << *row.mean_speed_kmh;
        os << ',';
        if (row.mean_heading_deg) os << *row.mean_heading_deg;
        os << ',' << row.heading_resultant << ',' << row.scene_count << ','
           << (row.anomaly ? 1 : 0) << '\n';
    }
    return os.str();
}

namespace {

// Minimal SVG line / bar plots; enough for visual inspection of the series.
struct Svg {
    std::ostringstream body;
    int w, h;
    Svg(int w_, int h_) : w(w_), h(h_) {}

    std::string finish(const std::string& title, const std::string& xlabel,
                       const std::string& ylabel) {
        std::ostringstream os;
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
           << "\" viewBox=\"0 0 " << w << " " << h << "\">\n"
           << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
           << "<text x=\"" << w / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">"
           << title << "</text>\n"
           << "<text x=\"" << w / 2 << "\" y=\"" << h - 6
           << "\" text-anchor=\"middle\" font-size=\"11\">" << xlabel << "</text>\n"
           << "<text x=\"14\" y=\"" << h / 2
           << "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 14 " << h / 2
           << ")\">" << ylabel << "</text>\n"
           << body.str() << "</svg>\n";
        return os.str();
    }
};

void write_series_plot(const std::string& path, const std::string& title,
                       const std::string& ylabel, const std::vector<std::string>& dates,
                       const std::vector<double>& values, const std::vector<bool>& defined) {
    const int W = 640, H = 360, L = 50, R = 15, T = 30, B = 40;
    Svg svg(W, H);
    double vmax = 1.0;
    for (size_t i = 0; i < values.size(); ++i)
        if (defined[i]) vmax = std::max(vmax, values[i]);
    int n = static_cast<int>(values.size());
    auto px = [&](int i) { return L + (n > 1 ? (W - L - R) * static_cast<double>(i) / (n - 1) : 0.0); };
    auto py = [&](double v) { return T + (H - T - B) * (1.0 - v / (vmax * 1.05)); };

    svg.body << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\""
             << H - B << "\" stroke=\"black\"/>\n"
             << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
             << "\" stroke=\"black\"/>\n";
    svg.body << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (int i = 0; i < n; ++i)
        if (defined[i]) svg.body << px(i) << ',' << py(values[i]) << ' ';
    svg.body << "\"/>\n";
    for (int i = 0; i < n; ++i)
        if (defined[i])
            svg.body << "<circle cx=\"" << px(i) << "\" cy=\"" << py(values[i])
                     << "\" r=\"2.2\" fill=\"steelblue\"/>\n";
    if (!dates.empty()) {
        svg.body << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\" font-size=\"10\">"
                 << dates.front() << "</text>\n"
                 << "<text x=\"" << W - R << "\" y=\"" << H - B + 16
                 << "\" text-anchor=\"end\" font-size=\"10\">" << dates.back() << "</text>\n";
    }
    char ymax[32];
    std::snprintf(ymax, sizeof(ymax), "%.0f", vmax);
    svg.body << "<text x=\"" << L - 4 << "\" y=\"" << T + 10
             << "\" text-anchor=\"end\" font-size=\"10\">" << ymax << "</text>\n";

    std::ofstream f(path, std::ios::binary);
    f << svg.finish(title, "date", ylabel);
}

void write_hist_plot(const std::string& path, const std::string& title, const std::string& xlabel,
                     const std::vector<double>& edges, const std::vector<long>& counts) {
    const int W = 640, H = 360, L = 50, R = 15, T = 30, B = 40;
    Svg svg(W, H);
    long vmax = 1;
    for (long c : counts) vmax = std::max(vmax, c);
    int n = static_cast<int>(counts.size());
    double bw = static_cast<double>(W - L - R) / n;
    for (int i = 0; i < n; ++i) {
        double bh = (H - T - B) * static_cast<double>(counts[i]) / (vmax * 1.05);
        svg.body << "<rect x=\"" << L + i * bw << "\" y=\"" << H - B - bh << "\" width=\""
                 << bw * 0.9 << "\" height=\"" << bh << "\" fill=\"darkorange\"/>\n";
    }
    svg.body << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\""
             << H - B << "\" stroke=\"black\"/>\n"
             << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
             << "\" stroke=\"black\"/>\n";
    char lo[32], hi[32], ym[32];
    std::snprintf(lo, sizeof(lo), "%.0f", edges.front());
    std::snprintf(hi, sizeof(hi), "%.0f", edges.back());
    std::snprintf(ym, sizeof(ym), "%ld", vmax);
    svg.body << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\" font-size=\"10\">" << lo
             << "</text>\n"
             << "<text x=\"" << W - R << "\" y=\"" << H - B + 16
             << "\" text-anchor=\"end\" font-size=\"10\">" << hi << "</text>\n"
             << "<text x=\"" << L - 4 << "\" y=\"" << T + 10
             << "\" text-anchor=\"end\" font-size=\"10\">" << ym << "</text>\n";

    std::ofstream f(path, std::ios::binary);
    f << svg.finish(title, xlabel, "count");
}

}  // namespace

void write_plots(const SeriesTable& table, const HistogramSpec& spec, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> dates;
    std::vector<double> totals, speeds, headings;
    std::vector<bool> always, speed_def, heading_def;
    for (const auto& row : table.rows) {
        dates.push_back(row.date);
        totals.push_back(row.total);
        always.push_back(true);
        speeds.push_back(row.mean_speed_kmh.value_or(0.0));
        speed_def.push_back(row.mean_speed_kmh.has_value());
        headings.push_back(row.mean_heading_deg.value_or(0.0));
        heading_def.push_back(row.mean_heading_deg.has_value());
    }
    write_series_plot(dir + "/counts.svg", "Moving vehicle detections per day", "count", dates,
                      totals, always);
    write_series_plot(dir + "/mean_speed.svg", "Mean speed over time", "speed (km/h)", dates,
                      speeds, speed_def);
    write_series_plot(dir + "/mean_heading.svg", "Mean heading over time", "heading (degrees)",
                      dates, headings, heading_def);

    std::vector<long> speed_hist(spec.speed_edges.size() - 1, 0);
    std::vector<long> heading_hist(spec.heading_edges.size() - 1, 0);
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.speed_hist.size() && i < speed_hist.size(); ++i)
            speed_hist[i] += row.speed_hist[i];
        for (size_t i = 0; i < row.heading_hist.size() && i < heading_hist.size(); ++i)
            heading_hist[i] += row.heading_hist[i];
    }
    write_hist_plot(dir + "/speed_hist.svg", "Histogram of vehicle speed", "speed (km/h)",
                    spec.speed_edges, speed_hist);
    write_hist_plot(dir + "/heading_hist.svg", "Histogram of vehicle heading (degrees)",
                    "heading (degrees)", spec.heading_edges, heading_hist);
}

}  // namespace vvec::timeseries
