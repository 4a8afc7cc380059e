#pragma once

#include "crowdnav/controllers.hpp"
#include "crowdnav/train.hpp"

namespace crowdnav {

struct ControllerSpec {
    enum class Kind { DstarBaseline, DstarPerfect, DstarForest, DstarExternal, Policy };

    Kind kind = Kind::DstarBaseline;
    std::string model_path;  // forest model / forecast file / checkpoint
    int baseline_radius = 1;

    std::string str() const;
};

/// Accepted forms: dstar+baseline, dstar+baseline:<radius>, dstar+perfect,
/// dstar+forest:<model>, dstar+external:<forecasts>, policy:<checkpoint>.
ControllerSpec parse_controller_spec(const std::string& s);

/// Loads any referenced model file up front (missing files fail before any
/// episode runs) and stamps out per-worker controller instances that share
/// the immutable predictor / network.
class ControllerFactory {
public:
    ControllerFactory(const ControllerSpec& spec, const TrajectoryStore& store,
                      const GridSpec& grid);

    std::unique_ptr<Controller> make() const;
    const std::string& name() const { return name_; }

private:
    ControllerSpec spec_;
    std::string name_;
    std::shared_ptr<const Predictor> predictor_;
    std::shared_ptr<const Checkpoint> checkpoint_;
};

struct BenchmarkConfig {
    std::string store_path;    // exactly one of store_path / synth_config
    std::string synth_config;
    SceneSpec scene;           // scene for store_path loads
    int grid_cols = 64;
    int grid_rows = 36;
    ControllerSpec controller;
    int64_t episodes = 100;
    uint64_t seed = 0;
    std::string out_dir;  // when nonempty: results.csv/.md, episodes.csv, events/
    int workers = 1;
    EpisodeSampling sampling;
    bool write_event_logs = true;

    void validate() const;
};

struct ControllerRow {
    std::string controller;
    int64_t episodes = 0;
    int64_t reached = 0;
    int64_t failed = 0;   // episodes that did not reach the goal (aborted included)
    int64_t aborted = 0;
    double mean_delay_percent = 0.0;  // over reached episodes only
    int64_t sr = 0;
    int64_t sp = 0;
    int64_t mrp = 0;
    int64_t stall_ticks = 0;

    friend bool operator==(const ControllerRow& a, const ControllerRow& b);
};

struct ResultsTable {
    std::vector<ControllerRow> rows;
    uint64_t seed = 0;
    std::string episode_hash;
    std::string config_hash;
    std::string version = kVersion;

    friend bool operator==(const ResultsTable& a, const ResultsTable& b);
};

struct BenchmarkOutput {
    ResultsTable table;
    std::vector<Episode> episodes;
    std::vector<EpisodeResult> results;
};

std::string episode_list_hash(const std::vector<Episode>& episodes);

/// Run one controller over a seeded episode list. Episode lists depend only
/// on (store, grid, episodes, seed, sampling), so different controller specs
/// under the same master seed are paired.
BenchmarkOutput run_benchmark(const BenchmarkConfig& cfg);

/// Aggregate per-episode results into a table row.
ControllerRow aggregate_results(const std::string& controller,
                                const std::vector<EpisodeResult>& results);

void export_results_csv(std::ostream& os, const ResultsTable& table);
void export_results_markdown(std::ostream& os, const ResultsTable& table);
ResultsTable load_results_csv(std::istream& is);
ResultsTable load_results_csv(const std::string& path);

struct NmseReport {
    double train = 0.0;
    double val = 0.0;
    double test = 0.0;
    double persistence_train = 0.0;
    double persistence_val = 0.0;
    double persistence_test = 0.0;
    size_t train_windows = 0;
    size_t val_windows = 0;
    size_t test_windows = 0;
};

/// 80/10/10 trajectory split, pooled NMSE per split for the forest alongside
/// the zero-motion persistence yardstick.
NmseReport eval_forest_nmse(const RegressionForest& forest, const TrajectoryStore& store,
                            uint64_t split_seed);

void write_nmse_report(std::ostream& os, const NmseReport& report);

}  // namespace crowdnav
