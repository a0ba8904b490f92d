#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "vvec/detector.hpp"
#include "vvec/eval.hpp"
#include "vvec/io.hpp"
#include "vvec/rng.hpp"
#include "vvec/synth.hpp"
#include "vvec/timeseries.hpp"

namespace fs = std::filesystem;
using namespace vvec;

namespace {

GeoTransform geotransform_of(const std::string& geojson_path) {
    std::ifstream in(geojson_path);
    if (!in) throw DataError("cannot open " + geojson_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(geojson_path + ": " + e.what());
    }
    GeoTransform gt;
    if (j.contains("properties") && j["properties"].contains("geotransform")) {
        auto arr = j["properties"]["geotransform"];
        if (arr.size() != 6) throw DataError(geojson_path + ": geotransform must have 6 values");
        for (int i = 0; i < 6; ++i) gt.g[i] = arr[i].get<double>();
    }
    return gt;
}

std::string date_for_day(int day_index) {
    using namespace std::chrono;
    year_month_day ymd{sys_days{year{2023} / April / 1} + days{day_index}};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::vector<vectorize::Detection> detections_from_mask(const RasterBundle& bundle,
                                                       const ProbMask& mask,
                                                       const detector::DetectorConfig& cfg) {
    mask.validate();
    std::map<std::string, int> thresh;
    for (const auto& label : mask.class_labels)
        thresh[label] = label == "static_car" ? cfg.static_thresh : cfg.anomaly_thresh;
    auto bin = mask_ops::threshold_mask(mask, thresh);

    std::vector<vectorize::Detection> dets;
    for (size_t p = 0; p < bin.planes.size(); ++p) {
        const auto& label = bin.class_labels[p];
        auto comps =
            mask_ops::extract_components(bin.planes[p], cfg.min_area_px, cfg.max_area_px, label);
        for (const auto& comp : comps) {
            vectorize::Detection d;
            d.cls = label;
            d.timestamp = bundle.timestamp;
            d.scene_id = bundle.scene_id;
            try {
                if (label == "static_car") {
                    d.footprint =
                        mask_ops::static_box(comp, bundle.sensor, bundle.width(), bundle.height());
                } else {
                    auto e = mask_ops::fit_ellipse(comp);
                    d.footprint = ellipse_polygon(e.center_px, e.semi_major_px, e.semi_minor_px,
                                                  e.orientation_deg);
                    d.velocity = vectorize::infer_vector(bundle, e, bundle.sensor, cfg.vec);
                }
            } catch (const DataError&) {
                continue;  // degenerate component, skip
            }
            d.id = static_cast<int>(dets.size());
            dets.push_back(d);
        }
    }
    return dets;
}

struct SynthOpts {
    std::string sensor = "skysat";
    std::string out;
    uint64_t seed = 0;
    int width = 512, height = 512;
    int moving_cars = 10, moving_trucks = 0, statics = 5, clouds = 0;
    double speed_min = 40.0, speed_max = 120.0;
    double noise_sigma = 8.0;
    std::string timestamp = "2023-04-01T10:00:00Z";
    std::string scene_id = "scene";
    bool truth_mask = false;
};

void run_synth(const SynthOpts& o) {
    auto sensor = sensor_preset(o.sensor);
    synth::RandomSceneConfig cfg;
    cfg.width_px = o.width;
    cfg.height_px = o.height;
    cfg.n_moving_cars = o.moving_cars;
    cfg.n_moving_trucks = o.moving_trucks;
    cfg.n_static = o.statics;
    cfg.n_clouds = o.clouds;
    cfg.speed_min_kmh = o.speed_min;
    cfg.speed_max_kmh = o.speed_max;
    cfg.noise_sigma = o.noise_sigma;
    cfg.timestamp = o.timestamp;
    cfg.scene_id = o.scene_id;
    auto spec = synth::random_scene(sensor, cfg, o.seed);
    auto [bundle, truth] = synth::render_scene(spec);
    io::write_bundle(bundle, o.out);
    io::write_truth(truth, bundle.geotransform, (fs::path(o.out) / "truth.geojson").string());
    if (o.truth_mask) {
        auto schema = synth::schema_for_sensor(sensor);
        io::write_mask(synth::render_truth_mask(truth, sensor, schema),
                       (fs::path(o.out) / "truth_mask.png").string());
    }
    std::printf("wrote %s: %dx%d %s scene, %zu truth records\n", o.out.c_str(), o.width, o.height,
                sensor.name.c_str(), truth.records.size());
}

struct DetectOpts {
    std::string in;
    std::string out;
    std::string mask_out;
};

void run_detect(const DetectOpts& o) {
    auto bundle = io::read_bundle(o.in);
    auto cfg = detector::default_config(bundle.sensor);
    if (!o.mask_out.empty())
        io::write_mask(detector::chromatic_anomaly_mask(bundle, cfg), o.mask_out);
    auto dets = detector::detect(bundle, bundle.sensor, cfg);
    io::write_detections(dets, bundle.geotransform, o.out);
    std::printf("%zu detections -> %s\n", dets.size(), o.out.c_str());
}

struct VectorizeOpts {
    std::string in;
    std::string mask;
    std::string out;
};

void run_vectorize(const VectorizeOpts& o) {
    auto bundle = io::read_bundle(o.in);
    auto mask = io::read_mask(o.mask);
    auto dets = detections_from_mask(bundle, mask, detector::default_config(bundle.sensor));
    io::write_detections(dets, bundle.geotransform, o.out);
    std::printf("%zu detections -> %s\n", dets.size(), o.out.c_str());
}

struct EvalOpts {
    std::vector<std::string> pred;
    std::vector<std::string> truth;
    double iou = 0.25;
    std::string report_out;
};

void run_eval(const EvalOpts& o) {
    if (o.pred.size() != o.truth.size())
        throw ConfigError("--pred and --truth must be given the same number of times");
    std::vector<eval::EvalReport> reports;
    for (size_t i = 0; i < o.pred.size(); ++i) {
        auto gt = geotransform_of(o.truth[i]);
        auto truth = io::read_truth(o.truth[i], gt);
        auto dets = io::read_detections(o.pred[i], geotransform_of(o.pred[i]));
        reports.push_back(eval::score(dets, truth, eval::MatchConfig{o.iou}));
    }
    auto merged = eval::merge_reports(reports);
    std::string text = eval::format_report(merged);
    std::fputs(text.c_str(), stdout);
    if (!o.report_out.empty()) io::write_text_atomic(o.report_out, text);
}

struct SeriesOpts {
    std::vector<std::string> pred;
    std::string out;
    int window = 7;
    double z = 3.0;
};

void run_timeseries(const SeriesOpts& o) {
    std::vector<vectorize::Detection> all;
    for (const auto& path : o.pred) {
        auto dets = io::read_detections(path, geotransform_of(path));
        all.insert(all.end(), dets.begin(), dets.end());
    }
    auto spec = timeseries::HistogramSpec::defaults();
    auto table = timeseries::aggregate(all, spec);
    timeseries::volume_anomaly(table, o.window, o.z);
    fs::create_directories(o.out);
    io::write_text_atomic((fs::path(o.out) / "series.csv").string(), timeseries::to_csv(table));
    timeseries::write_plots(table, spec, o.out);
    if (table.rejected_no_timestamp > 0)
        std::fprintf(stderr, "warning: %d detections had no timestamp\n",
                     table.rejected_no_timestamp);
    std::printf("%zu days -> %s\n", table.rows.size(), o.out.c_str());
    for (const auto& row : table.rows)
        if (row.anomaly) std::printf("anomaly: %s (total %d)\n", row.date.c_str(), row.total);
}

struct PipelineOpts {
    std::string sensor = "skysat";
    std::string out;
    uint64_t seed = 0;
    int days = 10;
    int scenes_per_day = 1;
    int moving_cars = 10, moving_trucks = 0, statics = 5, clouds = 0;
    int width = 512, height = 512;
};

void run_pipeline(const PipelineOpts& o) {
    auto sensor = sensor_preset(o.sensor);
    fs::create_directories(fs::path(o.out) / "scenes");
    fs::create_directories(fs::path(o.out) / "detections");

    std::vector<eval::EvalReport> reports;
    std::vector<vectorize::Detection> all;
    auto dcfg = detector::default_config(sensor);
    for (int day = 0; day < o.days; ++day) {
        for (int s = 0; s < o.scenes_per_day; ++s) {
            synth::RandomSceneConfig cfg;
            cfg.width_px = o.width;
            cfg.height_px = o.height;
            cfg.n_moving_cars = o.moving_cars;
            cfg.n_moving_trucks = o.moving_trucks;
            cfg.n_static = o.statics;
            cfg.n_clouds = o.clouds;
            cfg.timestamp = date_for_day(day) + "T10:00:00Z";
            char sid[32];
            std::snprintf(sid, sizeof(sid), "scene_d%03d_s%02d", day, s);
            cfg.scene_id = sid;
            auto spec = synth::random_scene(sensor, cfg, hash_combine(o.seed, day, s));
            auto [bundle, truth] = synth::render_scene(spec);

            std::string scene_dir = (fs::path(o.out) / "scenes" / sid).string();
            io::write_bundle(bundle, scene_dir);
            io::write_truth(truth, bundle.geotransform, scene_dir + "/truth.geojson");

            auto dets = detector::detect(bundle, sensor, dcfg);
            io::write_detections(
                dets, bundle.geotransform,
                (fs::path(o.out) / "detections" / (std::string(sid) + ".geojson")).string());
            reports.push_back(eval::score(dets, truth, eval::MatchConfig{}));
            all.insert(all.end(), dets.begin(), dets.end());
        }
    }

    auto merged = eval::merge_reports(reports);
    std::string report = eval::format_report(merged);
    io::write_text_atomic((fs::path(o.out) / "report.txt").string(), report);
    std::fputs(report.c_str(), stdout);

    auto spec = timeseries::HistogramSpec::defaults();
    auto table = timeseries::aggregate(all, spec);
    timeseries::volume_anomaly(table, std::min(7, std::max(3, o.days - 1)), 3.0);
    io::write_text_atomic((fs::path(o.out) / "series.csv").string(), timeseries::to_csv(table));
    timeseries::write_plots(table, spec, o.out);
    std::printf("pipeline: %d scenes -> %s\n", o.days * o.scenes_per_day, o.out.c_str());
}

void set_jobs(int jobs) {
#ifdef _OPENMP
    if (jobs > 0) omp_set_num_threads(jobs);
#else
    (void)jobs;
#endif
}

int run(int argc, char** argv) {
    CLI::App app{"rainbow-effect vehicle vector pipeline"};
    app.require_subcommand(1);
    int jobs = 0;
    app.add_option("--jobs", jobs, "worker thread count (0 = runtime default)");

    SynthOpts so;
    auto* synth_cmd = app.add_subcommand("synth", "render a random synthetic scene");
    synth_cmd->add_option("--sensor", so.sensor, "sensor preset (skysat|superdove)");
    synth_cmd->add_option("--out", so.out, "output bundle directory")->required();
    synth_cmd->add_option("--seed", so.seed, "RNG seed");
    synth_cmd->add_option("--width", so.width);
    synth_cmd->add_option("--height", so.height);
    synth_cmd->add_option("--moving-cars", so.moving_cars);
    synth_cmd->add_option("--moving-trucks", so.moving_trucks);
    synth_cmd->add_option("--static-cars", so.statics);
    synth_cmd->add_option("--clouds", so.clouds);
    synth_cmd->add_option("--speed-min", so.speed_min, "km/h");
    synth_cmd->add_option("--speed-max", so.speed_max, "km/h");
    synth_cmd->add_option("--noise-sigma", so.noise_sigma);
    synth_cmd->add_option("--timestamp", so.timestamp);
    synth_cmd->add_option("--scene-id", so.scene_id);
    synth_cmd->add_flag("--truth-mask", so.truth_mask, "also write the multi-class truth mask");
    synth_cmd->callback([&] { set_jobs(jobs); run_synth(so); });

    DetectOpts dto;
    auto* detect_cmd = app.add_subcommand("detect", "detect vehicles and infer velocity vectors");
    detect_cmd->add_option("--in", dto.in, "input bundle directory")->required();
    detect_cmd->add_option("--out", dto.out, "output detections geojson")->required();
    detect_cmd->add_option("--mask-out", dto.mask_out, "also write the anomaly score mask");
    detect_cmd->callback([&] { set_jobs(jobs); run_detect(dto); });

    VectorizeOpts vo;
    auto* vec_cmd = app.add_subcommand("vectorize", "turn an external mask into velocity vectors");
    vec_cmd->add_option("--in", vo.in, "input bundle directory")->required();
    vec_cmd->add_option("--mask", vo.mask, "multi-class score mask png")->required();
    vec_cmd->add_option("--out", vo.out, "output detections geojson")->required();
    vec_cmd->callback([&] { set_jobs(jobs); run_vectorize(vo); });

    EvalOpts eo;
    auto* eval_cmd = app.add_subcommand("eval", "score detections against ground truth");
    eval_cmd->add_option("--pred", eo.pred, "detections geojson (repeatable)")->required();
    eval_cmd->add_option("--truth", eo.truth, "truth geojson (repeatable)")->required();
    eval_cmd->add_option("--iou", eo.iou, "match IOU threshold");
    eval_cmd->add_option("--report-out", eo.report_out, "also write the report to a file");
    eval_cmd->callback([&] { set_jobs(jobs); run_eval(eo); });

    SeriesOpts to;
    auto* ts_cmd = app.add_subcommand("timeseries", "aggregate detections into daily traffic");
    ts_cmd->add_option("--pred", to.pred, "detections geojson (repeatable)")->required();
    ts_cmd->add_option("--out", to.out, "output directory")->required();
    ts_cmd->add_option("--window", to.window, "trailing anomaly window (days)");
    ts_cmd->add_option("--z", to.z, "anomaly z-score threshold");
    ts_cmd->callback([&] { set_jobs(jobs); run_timeseries(to); });

    PipelineOpts po;
    auto* pipe_cmd = app.add_subcommand("pipeline", "synth -> detect -> eval -> timeseries");
    pipe_cmd->add_option("--sensor", po.sensor, "sensor preset (skysat|superdove)");
    pipe_cmd->add_option("--out", po.out, "output directory")->required();
    pipe_cmd->add_option("--seed", po.seed, "RNG seed");
    pipe_cmd->add_option("--days", po.days);
    pipe_cmd->add_option("--scenes-per-day", po.scenes_per_day);
    pipe_cmd->add_option("--moving-cars", po.moving_cars);
    pipe_cmd->add_option("--moving-trucks", po.moving_trucks);
    pipe_cmd->add_option("--static-cars", po.statics);
    pipe_cmd->add_option("--clouds", po.clouds);
    pipe_cmd->add_option("--width", po.width);
    pipe_cmd->add_option("--height", po.height);
    pipe_cmd->callback([&] { set_jobs(jobs); run_pipeline(po); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
