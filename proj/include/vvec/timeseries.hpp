#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vvec/vectorize.hpp"

namespace vvec::timeseries {

struct HistogramSpec {
    std::vector<double> speed_edges;    // default 0-160 km/h, 16 bins
    std::vector<double> heading_edges;  // default 0-360 deg, 24 bins

    static HistogramSpec defaults();
    void validate() const;
};

struct DayRow {
    std::string date;  // UTC YYYY-MM-DD
    std::map<std::string, int> counts;
    int total = 0;
    std::optional<double> mean_speed_kmh;      // over resolved movers
    std::optional<double> mean_heading_deg;    // circular mean; absent if resultant ~ 0
    double heading_resultant = 0.0;            // [0, 1]
    int scene_count = 0;
    std::vector<int> speed_hist;
    std::vector<int> heading_hist;
    bool anomaly = false;
};

struct SeriesTable {
    std::vector<DayRow> rows;  // sorted by date
    int rejected_no_timestamp = 0;
};

// Direction of the mean unit vector plus resultant length. Resultant below
// 1e-9 leaves the mean undefined (e.g. antipodal headings).
std::pair<std::optional<double>, double> circular_mean(const std::vector<double>& headings_deg);

// Group detections by UTC date; count per class, average speed and heading
// over resolved movers. Detections without timestamps are rejected and tallied.
SeriesTable aggregate(const std::vector<vectorize::Detection>& detections,
                      const HistogramSpec& spec);

// Flag dates whose total count deviates from the trailing-window mean by at
// least z_thresh trailing standard deviations. Missing days are simply
// absent rows and do not enter the statistics.
void volume_anomaly(SeriesTable& table, int window, double z_thresh);

std::string to_csv(const SeriesTable& table);

// Standalone SVG plots: daily counts, mean speed, mean heading, and the
// pooled speed/heading histograms.
void write_plots(const SeriesTable& table, const HistogramSpec& spec, const std::string& dir);

}  // namespace vvec::timeseries
