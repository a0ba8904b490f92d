#include <doctest.h>

#include "vvec/rng.hpp"
#include "vvec/timeseries.hpp"

using namespace vvec;
using namespace vvec::timeseries;
using vectorize::Detection;
using vectorize::HeadingConfidence;
using vectorize::VelocityVector;

namespace {

Detection mover(const std::string& ts, double speed, double heading,
                const std::string& cls = "moving_car", const std::string& scene = "s0") {
    Detection d;
    d.cls = cls;
    d.timestamp = ts;
    d.scene_id = scene;
    VelocityVector v;
    v.speed.speed_kmh = speed;
    v.heading_deg = heading;
    v.confidence = HeadingConfidence::Resolved;
    d.velocity = v;
    return d;
}

}  // namespace

TEST_CASE("circular mean basics") {
    auto [m1, r1] = circular_mean({90.0});
    CHECK(*m1 == doctest::Approx(90.0));
    CHECK(r1 == doctest::Approx(1.0));

    auto [m2, r2] = circular_mean({0.0, 180.0});
    CHECK_FALSE(m2.has_value());
    CHECK(r2 < 1e-9);

    auto [m3, r3] = circular_mean({10.0, 350.0});
    CHECK(*m3 == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("circular mean of uniform 360 samples has tiny resultant") {
    std::vector<double> h;
    for (int i = 0; i < 360; ++i) h.push_back(i);
    auto [m, r] = circular_mean(h);
    CHECK(r < 0.01);
}

TEST_CASE("circular mean shift equivariance") {
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> h;
        for (int i = 0; i < 9; ++i) h.push_back(hash_uniform(trial, 1, i) * 120.0);  // clustered
        double delta = hash_uniform(trial, 2, 0) * 360.0;
        auto [base, rb] = circular_mean(h);
        REQUIRE(base.has_value());
        std::vector<double> shifted;
        for (double x : h) shifted.push_back(std::fmod(x + delta, 360.0));
        auto [sm, rs] = circular_mean(shifted);
        REQUIRE(sm.has_value());
        CHECK(circular_dist_deg(*sm, *base + delta) < 1e-6);
        CHECK(rs == doctest::Approx(rb).epsilon(1e-9));
    }
}

TEST_CASE("aggregate: empty input, basic means, class counts") {
    auto table = aggregate({}, HistogramSpec::defaults());
    CHECK(table.rows.empty());

    std::vector<Detection> dets{mover("2023-04-01T09:00:00Z", 40, 10),
                                mover("2023-04-01T09:00:00Z", 50, 20),
                                mover("2023-04-01T12:00:00Z", 60, 30, "moving_truck", "s1")};
    table = aggregate(dets, HistogramSpec::defaults());
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].total == 3);
    CHECK(table.rows[0].counts.at("moving_car") == 2);
    CHECK(table.rows[0].counts.at("moving_truck") == 1);
    CHECK(*table.rows[0].mean_speed_kmh == doctest::Approx(50.0));
    CHECK(table.rows[0].scene_count == 2);
}

TEST_CASE("aggregate: headings {10, 350} give circular mean 0 not 180") {
    std::vector<Detection> dets{mover("2023-04-02T09:00:00Z", 40, 10),
                                mover("2023-04-02T09:00:00Z", 40, 350)};
    auto table = aggregate(dets, HistogramSpec::defaults());
    REQUIRE(table.rows.size() == 1);
    REQUIRE(table.rows[0].mean_heading_deg.has_value());
    CHECK(circular_dist_deg(*table.rows[0].mean_heading_deg, 0.0) < 1e-6);
}

TEST_CASE("aggregate: missing timestamps rejected with tally; permutation invariant") {
    std::vector<Detection> dets{mover("2023-04-01T09:00:00Z", 40, 10), mover("", 50, 20),
                                mover("2023-04-03T09:00:00Z", 60, 30)};
    auto table = aggregate(dets, HistogramSpec::defaults());
    CHECK(table.rejected_no_timestamp == 1);
    int total = 0;
    for (const auto& row : table.rows) total += row.total;
    CHECK(total == 2);

    std::swap(dets[0], dets[2]);
    auto table2 = aggregate(dets, HistogramSpec::defaults());
    REQUIRE(table2.rows.size() == table.rows.size());
    for (size_t i = 0; i < table.rows.size(); ++i) CHECK(table2.rows[i].date == table.rows[i].date);
}

TEST_CASE("histogram bin totals equal resolved detection counts") {
    std::vector<Detection> dets;
    for (int i = 0; i < 25; ++i)
        dets.push_back(mover("2023-04-05T09:00:00Z", 5.0 + i * 6.0, i * 14.0));
    auto table = aggregate(dets, HistogramSpec::defaults());
    int sp = 0, hd = 0;
    for (int v : table.rows[0].speed_hist) sp += v;
    for (int v : table.rows[0].heading_hist) hd += v;
    CHECK(sp == 25);
    CHECK(hd == 25);
}

TEST_CASE("invalid histogram edges rejected") {
    HistogramSpec spec = HistogramSpec::defaults();
    spec.speed_edges = {10.0, 10.0, 20.0};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("volume anomaly: constant series never flagged") {
    SeriesTable table;
    for (int day = 1; day <= 30; ++day) {
        DayRow row;
        char buf[16];
        std::snprintf(buf, sizeof(buf), "2023-04-%02d", day);
        row.date = buf;
        row.total = 100;
        table.rows.push_back(row);
    }
    volume_anomaly(table, 7, 3.0);
    for (const auto& row : table.rows) CHECK_FALSE(row.anomaly);
}

TEST_CASE("volume anomaly: step drop flagged at the step date only") {
    SeriesTable table;
    for (int day = 0; day < 30; ++day) {
        DayRow row;
        char buf[16];
        std::snprintf(buf, sizeof(buf), "2023-04-%02d", day + 1);
        row.date = buf;
        row.total = day < 15 ? 100 : 20;
        table.rows.push_back(row);
    }
    volume_anomaly(table, 7, 3.0);
    for (size_t i = 0; i < table.rows.size(); ++i) CHECK(table.rows[i].anomaly == (i == 15));
}

TEST_CASE("volume anomaly: short series warns, no flags; window validated") {
    SeriesTable table;
    DayRow row;
    row.date = "2023-04-01";
    row.total = 10;
    table.rows.push_back(row);
    volume_anomaly(table, 7, 3.0);
    CHECK_FALSE(table.rows[0].anomaly);
    CHECK_THROWS_AS(volume_anomaly(table, 2, 3.0), ConfigError);
}

TEST_CASE("csv output has documented header and one row per date") {
    std::vector<Detection> dets{mover("2023-04-01T09:00:00Z", 40, 10),
                                mover("2023-04-02T09:00:00Z", 50, 20)};
    auto table = aggregate(dets, HistogramSpec::defaults());
    std::string csv = to_csv(table);
    CHECK(csv.find("date,total") == 0);
    CHECK(csv.find("2023-04-01") != std::string::npos);
    CHECK(csv.find("2023-04-02") != std::string::npos);
}
