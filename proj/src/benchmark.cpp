#include "crowdnav/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "crowdnav/synth.hpp"

namespace crowdnav {

std::string ControllerSpec::str() const {
    switch (kind) {
        case Kind::DstarBaseline:
            return baseline_radius == 1 ? "dstar+baseline"
                                        : "dstar+baseline:" + std::to_string(baseline_radius);
        case Kind::DstarPerfect: return "dstar+perfect";
        case Kind::DstarForest: return "dstar+forest:" + model_path;
        case Kind::DstarExternal: return "dstar+external:" + model_path;
        case Kind::Policy: return "policy:" + model_path;
    }
    return "?";
}

ControllerSpec parse_controller_spec(const std::string& s) {
    ControllerSpec spec;
    const size_t colon = s.find(':');
    const std::string head = s.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);

    if (head == "dstar+baseline") {
        spec.kind = ControllerSpec::Kind::DstarBaseline;
        if (!arg.empty()) {
            int64_t r = 0;
            if (!parse_i64(arg, r) || r < 0 || r > 8) {
                throw ValidationError("bad baseline radius in controller spec: " + s);
            }
            spec.baseline_radius = static_cast<int>(r);
        }
        return spec;
    }
    if (head == "dstar+perfect") {
        spec.kind = ControllerSpec::Kind::DstarPerfect;
        if (!arg.empty()) throw ValidationError("dstar+perfect takes no argument");
        return spec;
    }
    auto want_path = [&](ControllerSpec::Kind kind) {
        if (arg.empty()) throw ValidationError("controller spec needs a file: " + s);
        spec.kind = kind;
        spec.model_path = arg;
        return spec;
    };
    if (head == "dstar+forest") return want_path(ControllerSpec::Kind::DstarForest);
    if (head == "dstar+external") return want_path(ControllerSpec::Kind::DstarExternal);
    if (head == "policy") return want_path(ControllerSpec::Kind::Policy);
    throw ValidationError("unknown controller spec: " + s);
}

ControllerFactory::ControllerFactory(const ControllerSpec& spec, const TrajectoryStore& store,
                                     const GridSpec& grid)
    : spec_(spec) {
    switch (spec.kind) {
        case ControllerSpec::Kind::DstarBaseline:
            predictor_ = std::make_shared<BaselinePredictor>(spec.baseline_radius);
            break;
        case ControllerSpec::Kind::DstarPerfect:
            predictor_ = std::make_shared<PerfectPredictor>();
            break;
        case ControllerSpec::Kind::DstarForest: {
            const RegressionForest forest = load_forest(spec.model_path);
            predictor_ = std::make_shared<ForestPredictor>(forest, store, grid);
            break;
        }
        case ControllerSpec::Kind::DstarExternal:
            predictor_ = std::make_shared<ExternalPredictor>(load_external_forecast(spec.model_path));
            break;
        case ControllerSpec::Kind::Policy:
            checkpoint_ = std::make_shared<Checkpoint>(load_checkpoint(spec.model_path));
            break;
    }
    name_ = predictor_ ? "dstar+" + predictor_->name() : "policy";
}

std::unique_ptr<Controller> ControllerFactory::make() const {
    if (predictor_) return std::make_unique<DStarController>(predictor_);
    return std::make_unique<PolicyController>(checkpoint_->net);
}

void BenchmarkConfig::validate() const {
    if (store_path.empty() == synth_config.empty()) {
        throw ValidationError("benchmark needs exactly one of a store path or a generator config");
    }
    if (episodes < 1) throw ValidationError("episode count must be >= 1");
    if (workers < 1) throw ValidationError("worker count must be >= 1");
    scene.validate();
    if (grid_cols < 1 || grid_rows < 1) throw ValidationError("bad grid dimensions");
}

std::string episode_list_hash(const std::vector<Episode>& episodes) {
    Fnv1a h;
    for (const Episode& ep : episodes) {
        h.update_u64(static_cast<uint64_t>(ep.start.col));
        h.update_u64(static_cast<uint64_t>(ep.start.row));
        h.update_u64(static_cast<uint64_t>(ep.goal.col));
        h.update_u64(static_cast<uint64_t>(ep.goal.row));
        h.update_u64(static_cast<uint64_t>(ep.start_frame));
        h.update_u64(ep.seed);
    }
    return h.hex();
}

ControllerRow aggregate_results(const std::string& controller,
                                const std::vector<EpisodeResult>& results) {
    ControllerRow row;
    row.controller = controller;
    row.episodes = static_cast<int64_t>(results.size());
    double delay_sum = 0.0;
    for (const EpisodeResult& r : results) {
        if (r.reached_goal) {
            ++row.reached;
            delay_sum += r.delay_percent;
        } else {
            ++row.failed;
        }
        if (r.aborted) ++row.aborted;
        row.sr += r.sr;
        row.sp += r.sp;
        row.mrp += r.mrp;
        row.stall_ticks += r.stall_ticks;
    }
    row.mean_delay_percent = row.reached > 0 ? delay_sum / static_cast<double>(row.reached) : 0.0;
    return row;
}

namespace {

std::string config_fingerprint(const BenchmarkConfig& cfg) {
    std::ostringstream ss;
    ss << cfg.controller.str() << '|' << cfg.store_path << '|' << cfg.synth_config << '|'
       << format_double(cfg.scene.width) << 'x' << format_double(cfg.scene.height) << '|'
       << cfg.grid_cols << 'x' << cfg.grid_rows << '|' << cfg.episodes << '|' << cfg.seed << '|'
       << cfg.sampling.min_remaining_frames;
    Fnv1a h;
    h.update(ss.str());
    return h.hex();
}

void write_episodes_csv(std::ostream& os, const std::vector<Episode>& episodes,
                        const std::vector<EpisodeResult>& results) {
    os << "episode,start_col,start_row,goal_col,goal_row,start_frame,seed,"
          "reached_goal,aborted,steps,optimal,delay_percent,sr,sp,mrp,stall_ticks\n";
    for (size_t i = 0; i < episodes.size(); ++i) {
        const Episode& ep = episodes[i];
        const EpisodeResult& r = results[i];
        os << i << ',' << ep.start.col << ',' << ep.start.row << ',' << ep.goal.col << ','
           << ep.goal.row << ',' << ep.start_frame << ',' << ep.seed << ','
           << (r.reached_goal ? 1 : 0) << ',' << (r.aborted ? 1 : 0) << ',' << r.steps_taken << ','
           << r.optimal_steps << ',' << format_double(r.delay_percent) << ',' << r.sr << ','
           << r.sp << ',' << r.mrp << ',' << r.stall_ticks << '\n';
    }
}

}  // namespace

BenchmarkOutput run_benchmark(const BenchmarkConfig& cfg) {
    cfg.validate();

    TrajectoryStore store;
    if (!cfg.store_path.empty()) {
        store = load_trajectories(cfg.store_path, cfg.scene);
    } else {
        store = synth_crowd(load_synth_config(cfg.synth_config));
    }
    const GridSpec grid = GridSpec::from_scene(store.scene(), cfg.grid_cols, cfg.grid_rows);

    const ControllerFactory factory(cfg.controller, store, grid);
    const FrameIndex index(store);

    BenchmarkOutput out;
    out.episodes = make_episodes(store, grid, cfg.episodes, cfg.seed, cfg.sampling);
    out.results.resize(out.episodes.size());

    const int workers = std::min<int>(cfg.workers, static_cast<int>(out.episodes.size()));
    if (workers <= 1) {
        auto controller = factory.make();
        for (size_t i = 0; i < out.episodes.size(); ++i) {
            out.results[i] = run_episode(*controller, out.episodes[i], store, index, grid);
        }
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                auto controller = factory.make();
                while (true) {
                    const size_t i = next.fetch_add(1);
                    if (i >= out.episodes.size()) break;
                    out.results[i] = run_episode(*controller, out.episodes[i], store, index, grid);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    out.table.rows.push_back(aggregate_results(factory.name(), out.results));
    out.table.seed = cfg.seed;
    out.table.episode_hash = episode_list_hash(out.episodes);
    out.table.config_hash = config_fingerprint(cfg);

    if (!cfg.out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(cfg.out_dir);
        {
            std::ofstream os(cfg.out_dir + "/results.csv");
            if (!os) throw ValidationError("cannot write results.csv under " + cfg.out_dir);
            export_results_csv(os, out.table);
        }
        {
            std::ofstream os(cfg.out_dir + "/results.md");
            export_results_markdown(os, out.table);
        }
        {
            std::ofstream os(cfg.out_dir + "/episodes.csv");
            write_episodes_csv(os, out.episodes, out.results);
        }
        if (cfg.write_event_logs) {
            const std::string events_dir = cfg.out_dir + "/events";
            fs::create_directories(events_dir);
            for (size_t i = 0; i < out.episodes.size(); ++i) {
                std::ofstream os(events_dir + "/episode_" + std::to_string(i) + ".csv");
                write_event_log(os, out.episodes[i], out.results[i]);
            }
        }
    }
    return out;
}

bool operator==(const ControllerRow& a, const ControllerRow& b) {
    return a.controller == b.controller && a.episodes == b.episodes && a.reached == b.reached &&
           a.failed == b.failed && a.aborted == b.aborted &&
           a.mean_delay_percent == b.mean_delay_percent && a.sr == b.sr && a.sp == b.sp &&
           a.mrp == b.mrp && a.stall_ticks == b.stall_ticks;
}

bool operator==(const ResultsTable& a, const ResultsTable& b) {
    return a.rows == b.rows && a.seed == b.seed && a.episode_hash == b.episode_hash &&
           a.config_hash == b.config_hash && a.version == b.version;
}

namespace {
constexpr const char* kResultsHeader =
    "controller,episodes,reached,failed,aborted,mean_delay_percent,sr,sp,mrp,stall_ticks,"
    "seed,episode_hash,config_hash,version";
}

void export_results_csv(std::ostream& os, const ResultsTable& table) {
    os << kResultsHeader << '\n';
    for (const ControllerRow& r : table.rows) {
        os << r.controller << ',' << r.episodes << ',' << r.reached << ',' << r.failed << ','
           << r.aborted << ',' << format_double(r.mean_delay_percent) << ',' << r.sr << ',' << r.sp
           << ',' << r.mrp << ',' << r.stall_ticks << ',' << table.seed << ','
           << table.episode_hash << ',' << table.config_hash << ',' << table.version << '\n';
    }
    if (table.rows.empty()) {
        // Header-only file still carries the metadata columns.
    }
}

void export_results_markdown(std::ostream& os, const ResultsTable& table) {
    os << "| controller | episodes | reached | failed | mean delay % | SR | SP | MRP |\n";
    os << "|---|---|---|---|---|---|---|---|\n";
    for (const ControllerRow& r : table.rows) {
        os << "| " << r.controller << " | " << r.episodes << " | " << r.reached << " | "
           << r.failed << " | " << format_double(r.mean_delay_percent) << " | " << r.sr << " | "
           << r.sp << " | " << r.mrp << " |\n";
    }
    os << "\nseed " << table.seed << ", episode hash " << table.episode_hash << ", config hash "
       << table.config_hash << ", version " << table.version << "\n";
}

ResultsTable load_results_csv(std::istream& is) {
    ResultsTable table;
    std::string line;
    bool saw_header = false;
    bool saw_meta = false;
    size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string_view stripped = trim(line);
        if (stripped.empty()) continue;
        if (!saw_header) {
            if (stripped != kResultsHeader) throw ParseError("results csv: unexpected header");
            saw_header = true;
            continue;
        }
        const auto f = split_on(stripped, ',');
        if (f.size() != 14) {
            throw ParseError("results csv line " + std::to_string(line_no) + ": expected 14 fields");
        }
        ControllerRow r;
        r.controller = std::string(f[0]);
        int64_t seed = 0;
        if (!parse_i64(f[1], r.episodes) || !parse_i64(f[2], r.reached) ||
            !parse_i64(f[3], r.failed) || !parse_i64(f[4], r.aborted) ||
            !parse_f64(f[5], r.mean_delay_percent) || !parse_i64(f[6], r.sr) ||
            !parse_i64(f[7], r.sp) || !parse_i64(f[8], r.mrp) || !parse_i64(f[9], r.stall_ticks) ||
            !parse_i64(f[10], seed)) {
            throw ParseError("results csv line " + std::to_string(line_no) + ": bad numeric field");
        }
        const std::string episode_hash(f[11]);
        const std::string config_hash(f[12]);
        const std::string version(f[13]);
        if (saw_meta) {
            if (table.seed != static_cast<uint64_t>(seed) || table.episode_hash != episode_hash ||
                table.config_hash != config_hash || table.version != version) {
                throw ValidationError("results csv: inconsistent metadata across rows");
            }
        } else {
            table.seed = static_cast<uint64_t>(seed);
            table.episode_hash = episode_hash;
            table.config_hash = config_hash;
            table.version = version;
            saw_meta = true;
        }
        table.rows.push_back(std::move(r));
    }
    if (!saw_header) throw ParseError("results csv: missing header");
    return table;
}

ResultsTable load_results_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open results csv: " + path);
    return load_results_csv(is);
}

NmseReport eval_forest_nmse(const RegressionForest& forest, const TrajectoryStore& store,
                            uint64_t split_seed) {
    const TrajectoryStore eligible = filter_min_length(store, kHistoryLen + kHorizon);
    if (eligible.size() < 10) {
        throw ValidationError("need at least 10 trajectories with 10+ frames to evaluate");
    }
    const SplitIndices split = split_by_trajectory(eligible.size(), split_seed);

    NmseReport report;
    auto run_split = [&](const std::vector<size_t>& idx, double& out, double& out_persist,
                         size_t& out_windows) {
        std::vector<Vec2> pred;
        std::vector<Vec2> persist;
        std::vector<Vec2> truth;
        for (size_t i : idx) {
            for (const TrainingWindow& w : build_training_windows(eligible.trajectories()[i])) {
                const Vec2 origin{w.features[8], w.features[9]};
                const ForecastTargets y = forest.predict(w.features);
                for (int k = 0; k < kHorizon; ++k) {
                    pred.push_back(origin + Vec2{y[static_cast<size_t>(2 * k)],
                                                 y[static_cast<size_t>(2 * k + 1)]});
                    persist.push_back(origin);
                    truth.push_back(origin + Vec2{w.targets[static_cast<size_t>(2 * k)],
                                                  w.targets[static_cast<size_t>(2 * k + 1)]});
                }
            }
        }
        out_windows = truth.size() / kHorizon;
        if (truth.empty()) throw ValidationError("evaluation split has no prediction windows");
        out = nmse(pred, truth, eligible.scene());
        out_persist = nmse(persist, truth, eligible.scene());
    };
    run_split(split.train, report.train, report.persistence_train, report.train_windows);
    run_split(split.val, report.val, report.persistence_val, report.val_windows);
    run_split(split.test, report.test, report.persistence_test, report.test_windows);
    return report;
}

void write_nmse_report(std::ostream& os, const NmseReport& r) {
    os << "split,windows,forest_nmse,persistence_nmse\n";
    os << "train," << r.train_windows << ',' << format_double(r.train) << ','
       << format_double(r.persistence_train) << '\n';
    os << "val," << r.val_windows << ',' << format_double(r.val) << ','
       << format_double(r.persistence_val) << '\n';
    os << "test," << r.test_windows << ',' << format_double(r.test) << ','
       << format_double(r.persistence_test) << '\n';
}

}  // namespace crowdnav
