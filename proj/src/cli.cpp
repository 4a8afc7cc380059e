#include "crowdnav/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

#include "crowdnav/benchmark.hpp"
#include "crowdnav/render.hpp"
#include "crowdnav/synth.hpp"
#include "crowdnav/train.hpp"

namespace crowdnav {

namespace {

struct SceneFlags {
    double width = 1920.0;
    double height = 1080.0;

    SceneSpec scene() const { return SceneSpec{width, height}; }
};

void add_scene_flags(CLI::App* cmd, SceneFlags& f) {
    cmd->add_option("--scene-x", f.width, "scene width in pixels");
    cmd->add_option("--scene-y", f.height, "scene height in pixels");
}

std::ofstream open_out_file(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot write file: " + path);
    return os;
}

void cmd_ingest(const std::string& in, const std::string& out, const SceneFlags& scene,
                int64_t min_length, std::ostream& log) {
    LoadReport report;
    const TrajectoryStore store = load_trajectories(in, scene.scene(), &report);
    const TrajectoryStore kept = filter_min_length(store, static_cast<size_t>(min_length));
    auto os = open_out_file(out);
    save_trajectories(kept, os);
    log << "records " << report.records << ", trajectories " << report.input_trajectories
        << ", gap splits " << report.gap_splits << ", dropped short "
        << report.dropped_short_segments << "\n";
    log << "kept " << kept.size() << " trajectories (" << kept.total_points() << " points) after "
        << "min length " << min_length << "\n";
}

void cmd_synth(const std::string& config, bool seed_set, uint64_t seed, const std::string& out,
               std::ostream& log) {
    SynthConfig cfg = load_synth_config(config);
    if (seed_set) cfg.seed = seed;
    const TrajectoryStore store = synth_crowd(cfg);
    auto os = open_out_file(out);
    save_trajectories(store, os);
    log << "generated " << store.size() << " trajectories (" << store.total_points()
        << " points) with seed " << cfg.seed << "\n";
}

void cmd_train_forest(const std::string& in, const SceneFlags& scene, const std::string& out,
                      const ForestParams& params, uint64_t seed, std::ostream& log) {
    const TrajectoryStore store = load_trajectories(in, scene.scene());
    const std::vector<TrainingWindow> windows = build_training_windows(store);
    if (windows.empty()) throw ValidationError("no trajectory long enough to train on");
    const RegressionForest forest = fit_forest(windows, params, seed);
    save_forest(out, forest);
    log << "trained " << params.tree_count << " trees on " << windows.size() << " windows -> "
        << out << "\n";
}

void cmd_train_policy(const TrajectoryStore& store, int cols, int rows, TrainConfig cfg,
                      uint64_t seed, const std::string& out, std::ostream& log) {
    std::filesystem::create_directories(out);
    const GridSpec grid = GridSpec::from_scene(store.scene(), cols, rows);
    const TrainResult result = train_policy(store, grid, cfg, seed, out);
    save_checkpoint(out + "/policy.bin", result.checkpoint);
    {
        auto os = open_out_file(out + "/training_log.csv");
        save_training_log(os, result.log);
    }
    int64_t reached = 0;
    for (const TrainEpisodeLog& e : result.log) reached += e.reached_goal ? 1 : 0;
    log << "trained " << result.log.size() << " episodes, " << reached << " reached goal -> "
        << out << "/policy.bin\n";
}

void cmd_simulate(const BenchmarkConfig& cfg, std::ostream& log) {
    const BenchmarkOutput output = run_benchmark(cfg);
    export_results_markdown(log, output.table);
}

void cmd_eval_predictor(const std::string& in, const SceneFlags& scene, const std::string& model,
                        uint64_t seed, const std::string& out, std::ostream& log) {
    const TrajectoryStore store = load_trajectories(in, scene.scene());
    const RegressionForest forest = load_forest(model);
    const NmseReport report = eval_forest_nmse(forest, store, seed);
    if (out.empty()) {
        write_nmse_report(log, report);
    } else {
        auto os = open_out_file(out);
        write_nmse_report(os, report);
        log << "wrote " << out << "\n";
    }
}

void cmd_render(const std::string& log_path, const std::string& in, const SceneFlags& scene,
                int cols, int rows, const RenderOptions& opts, const std::string& out,
                std::ostream& log) {
    const std::vector<EventLogRow> rows_log = load_event_log(log_path);
    const TrajectoryStore store = load_trajectories(in, scene.scene());
    const GridSpec grid = GridSpec::from_scene(store.scene(), cols, rows);
    const size_t n = render_episode_frames(rows_log, store, grid, out, opts);
    log << "wrote " << n << " frames to " << out << "\n";
}

void cmd_export(const std::string& in, const std::string& format, const std::string& out,
                std::ostream& log) {
    const ResultsTable table = load_results_csv(in);
    std::ofstream file;
    std::ostream* os = &log;
    if (!out.empty()) {
        file = open_out_file(out);
        os = &file;
    }
    if (format == "csv") {
        export_results_csv(*os, table);
    } else {
        export_results_markdown(*os, table);
    }
    if (!out.empty()) log << "wrote " << out << "\n";
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"crowd navigation benchmark toolkit"};
    app.name("crowdnav");
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "normalize a raw trajectory recording");
    std::string ingest_in, ingest_out;
    int64_t ingest_min_length = 10;
    SceneFlags ingest_scene;
    ingest->add_option("--in", ingest_in, "raw trajectory file")->required();
    ingest->add_option("--out", ingest_out, "canonical output file")->required();
    ingest->add_option("--min-length", ingest_min_length, "minimum trajectory length to keep");
    add_scene_flags(ingest, ingest_scene);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic crowd recording");
    std::string synth_config, synth_out;
    uint64_t synth_seed = 0;
    synth->add_option("--config", synth_config, "generator config file")->required();
    auto* synth_seed_opt = synth->add_option("--seed", synth_seed, "override the config seed");
    synth->add_option("--out", synth_out, "trajectory output file")->required();

    // train-forest
    auto* tforest = app.add_subcommand("train-forest", "fit the trajectory prediction forest");
    std::string tforest_in, tforest_out;
    SceneFlags tforest_scene;
    ForestParams tforest_params;
    uint64_t tforest_seed = 0;
    bool tforest_no_bootstrap = false;
    tforest->add_option("--in", tforest_in, "trajectory file")->required();
    tforest->add_option("--out", tforest_out, "model output file")->required();
    tforest->add_option("--trees", tforest_params.tree_count, "number of trees");
    tforest->add_option("--max-depth", tforest_params.max_depth, "depth cap (-1 = unbounded)");
    tforest->add_option("--min-samples-leaf", tforest_params.min_samples_leaf,
                        "minimum samples per leaf");
    tforest->add_option("--mtry", tforest_params.features_per_split, "features tried per split");
    tforest->add_flag("--no-bootstrap", tforest_no_bootstrap, "train each tree on the full set");
    tforest->add_option("--seed", tforest_seed, "training seed");
    add_scene_flags(tforest, tforest_scene);

    // train-policy
    auto* tpolicy = app.add_subcommand("train-policy", "train the navigation policy");
    std::string tpolicy_in, tpolicy_config, tpolicy_out;
    SceneFlags tpolicy_scene;
    TrainConfig tpolicy_cfg;
    uint64_t tpolicy_seed = 0;
    int tpolicy_cols = 64, tpolicy_rows = 36;
    auto* tpolicy_in_opt = tpolicy->add_option("--in", tpolicy_in, "trajectory file");
    auto* tpolicy_cfg_opt =
        tpolicy->add_option("--config", tpolicy_config, "generator config file");
    tpolicy_in_opt->excludes(tpolicy_cfg_opt);
    tpolicy->add_option("--episodes", tpolicy_cfg.episodes, "training episodes");
    tpolicy->add_option("--batch", tpolicy_cfg.batch_episodes, "episodes per gradient step");
    tpolicy->add_option("--lr", tpolicy_cfg.learning_rate, "learning rate");
    tpolicy->add_option("--seed", tpolicy_seed, "training seed");
    tpolicy->add_option("--cols", tpolicy_cols, "grid columns");
    tpolicy->add_option("--rows", tpolicy_rows, "grid rows");
    tpolicy->add_option("--min-remaining", tpolicy_cfg.sampling.min_remaining_frames,
                        "frames that must remain after an episode start");
    tpolicy->add_option("--out", tpolicy_out, "output directory")->required();
    add_scene_flags(tpolicy, tpolicy_scene);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run a benchmark");
    BenchmarkConfig sim_cfg;
    SceneFlags sim_scene;
    std::string sim_controller = "dstar+baseline";
    bool sim_no_events = false;
    sim_cfg.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    auto* sim_in_opt = simulate->add_option("--in", sim_cfg.store_path, "trajectory file");
    auto* sim_cfg_opt =
        simulate->add_option("--config", sim_cfg.synth_config, "generator config file");
    sim_in_opt->excludes(sim_cfg_opt);
    simulate->add_option("--controller", sim_controller, "controller spec")->required();
    simulate->add_option("--episodes", sim_cfg.episodes, "episode count");
    simulate->add_option("--seed", sim_cfg.seed, "master seed");
    simulate->add_option("--out", sim_cfg.out_dir, "output directory");
    simulate->add_option("--workers", sim_cfg.workers, "worker threads");
    simulate->add_option("--cols", sim_cfg.grid_cols, "grid columns");
    simulate->add_option("--rows", sim_cfg.grid_rows, "grid rows");
    simulate->add_option("--min-remaining", sim_cfg.sampling.min_remaining_frames,
                         "frames that must remain after an episode start");
    simulate->add_flag("--no-events", sim_no_events, "skip per-episode event logs");
    add_scene_flags(simulate, sim_scene);

    // eval-predictor
    auto* evalp = app.add_subcommand("eval-predictor", "report forest NMSE on a held-out split");
    std::string evalp_in, evalp_model, evalp_out;
    SceneFlags evalp_scene;
    uint64_t evalp_seed = 0;
    evalp->add_option("--in", evalp_in, "trajectory file")->required();
    evalp->add_option("--model", evalp_model, "forest model file")->required();
    evalp->add_option("--seed", evalp_seed, "split seed");
    evalp->add_option("--out", evalp_out, "report file (default: stdout)");
    add_scene_flags(evalp, evalp_scene);

    // render
    auto* render = app.add_subcommand("render", "rasterize an episode event log");
    std::string render_log, render_in, render_out;
    SceneFlags render_scene;
    RenderOptions render_opts;
    int render_cols = 64, render_rows = 36;
    render->add_option("--log", render_log, "event log file")->required();
    render->add_option("--in", render_in, "trajectory file")->required();
    render->add_option("--out", render_out, "frame directory")->required();
    render->add_option("--cell-px", render_opts.cell_px, "pixels per cell");
    render->add_option("--goal-col", render_opts.goal.col, "goal column to highlight");
    render->add_option("--goal-row", render_opts.goal.row, "goal row to highlight");
    render->add_option("--cols", render_cols, "grid columns");
    render->add_option("--rows", render_rows, "grid rows");
    add_scene_flags(render, render_scene);

    // export
    auto* exportc = app.add_subcommand("export", "re-emit a results table");
    std::string export_in, export_format = "markdown", export_out;
    exportc->add_option("--in", export_in, "results csv")->required();
    exportc->add_option("--format", export_format, "csv or markdown")
        ->check(CLI::IsMember({"csv", "markdown"}));
    exportc->add_option("--out", export_out, "output file (default: stdout)");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));

        if (*ingest) {
            cmd_ingest(ingest_in, ingest_out, ingest_scene, ingest_min_length, out);
        } else if (*synth) {
            cmd_synth(synth_config, synth_seed_opt->count() > 0, synth_seed, synth_out, out);
        } else if (*tforest) {
            tforest_params.bootstrap = !tforest_no_bootstrap;
            cmd_train_forest(tforest_in, tforest_scene, tforest_out, tforest_params, tforest_seed,
                             out);
        } else if (*tpolicy) {
            if (tpolicy_in.empty() == tpolicy_config.empty()) {
                throw ValidationError("train-policy needs exactly one of --in / --config");
            }
            const TrajectoryStore store =
                tpolicy_in.empty() ? synth_crowd(load_synth_config(tpolicy_config))
                                   : load_trajectories(tpolicy_in, tpolicy_scene.scene());
            cmd_train_policy(store, tpolicy_cols, tpolicy_rows, tpolicy_cfg, tpolicy_seed,
                             tpolicy_out, out);
        } else if (*simulate) {
            sim_cfg.scene = sim_scene.scene();
            sim_cfg.controller = parse_controller_spec(sim_controller);
            sim_cfg.write_event_logs = !sim_no_events;
            cmd_simulate(sim_cfg, out);
        } else if (*evalp) {
            cmd_eval_predictor(evalp_in, evalp_scene, evalp_model, evalp_seed, evalp_out, out);
        } else if (*render) {
            cmd_render(render_log, render_in, render_scene, render_cols, render_rows, render_opts,
                       render_out, out);
        } else if (*exportc) {
            cmd_export(export_in, export_format, export_out, out);
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

}  // namespace crowdnav
