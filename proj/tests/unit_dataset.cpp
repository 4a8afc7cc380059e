#include <doctest.h>

#include <sstream>

#include "crowdnav/synth.hpp"
#include "crowdnav/trajectory.hpp"
#include "support/oracles.hpp"

using namespace crowdnav;

TEST_SUITE_BEGIN("dataset");

namespace {
const SceneSpec kScene{};
const GridSpec kGrid = GridSpec::from_scene(kScene);
}  // namespace

TEST_CASE("load keeps a clean single trajectory intact") {
    std::ostringstream file;
    file << "# comment line\n";
    for (int i = 0; i < 12; ++i) file << "7 " << (100 + i) << " " << (10.5 + 30 * i) << " 200\n";
    std::istringstream in(file.str());
    LoadReport report;
    const TrajectoryStore store = load_trajectories(in, kScene, &report);
    REQUIRE(store.size() == 1);
    CHECK(store.trajectories()[0].pedestrian_id == 7);
    CHECK(store.trajectories()[0].length() == 12);
    CHECK(store.min_frame() == 100);
    CHECK(store.max_frame() == 111);
    CHECK(report.records == 12);
    CHECK(report.input_trajectories == 1);
    CHECK(report.kept_trajectories == 1);
}

TEST_CASE("empty file loads as an empty store") {
    std::istringstream in("");
    const TrajectoryStore store = load_trajectories(in, kScene);
    CHECK(store.empty());
    CHECK(!store.has_frames());
}

TEST_CASE("out-of-bounds coordinate names the pedestrian and frame") {
    std::istringstream in("3 42 2000 500\n");
    CHECK_THROWS_WITH_AS(load_trajectories(in, kScene),
                         doctest::Contains("pedestrian 3"), ValidationError);
    std::istringstream in2("3 42 2000 500\n");
    CHECK_THROWS_WITH_AS(load_trajectories(in2, kScene), doctest::Contains("frame 42"),
                         ValidationError);
}

TEST_CASE("malformed line reports its line number") {
    std::istringstream in("1 0 5 5\nnot a record\n");
    CHECK_THROWS_WITH_AS(load_trajectories(in, kScene), doctest::Contains("line 2"), ParseError);
}

TEST_CASE("frame gaps split into maximal segments") {
    std::ostringstream file;
    for (int i = 0; i <= 4; ++i) file << "1 " << i << " 50 50\n";
    for (int i = 7; i <= 16; ++i) file << "1 " << i << " 80 80\n";
    file << "2 0 10 10\n";  // a lone point cannot form a segment
    std::istringstream in(file.str());
    LoadReport report;
    const TrajectoryStore store = load_trajectories(in, kScene, &report);
    CHECK(report.input_trajectories == 2);
    CHECK(report.gap_splits == 1);
    CHECK(report.dropped_short_segments == 1);
    REQUIRE(store.size() == 2);
    CHECK(store.trajectories()[0].length() == 5);
    CHECK(store.trajectories()[1].length() == 10);
    for (const RawTrajectory& t : store.trajectories()) {
        for (size_t i = 1; i < t.points.size(); ++i) {
            CHECK(t.points[i].frame == t.points[i - 1].frame + 1);
        }
    }
}

TEST_CASE("filter_min_length keeps exactly the long trajectories") {
    std::vector<RawTrajectory> ts;
    int64_t id = 1;
    for (size_t len : {9, 10, 37}) {
        ts.push_back(testing::stand_at(id++, 0, {5, 5}, static_cast<int64_t>(len), kGrid));
    }
    const TrajectoryStore store(ts, kScene);
    const TrajectoryStore kept = filter_min_length(store, 10);
    REQUIRE(kept.size() == 2);
    CHECK(kept.trajectories()[0].length() == 10);
    CHECK(kept.trajectories()[1].length() == 37);
    CHECK(store.size() == 3);  // input unmodified

    CHECK(filter_min_length(store, 1) == store);
    CHECK(filter_min_length(store, 100).empty());
    CHECK(filter_min_length(kept, 10) == kept);  // idempotent
}

TEST_CASE("to_grid corner and interior cases") {
    CHECK(to_grid({0, 0}, kGrid) == CellIndex{0, 0});
    CHECK(to_grid({1919, 1079}, kGrid) == CellIndex{63, 35});
    CHECK(to_grid({35, 30}, kGrid) == CellIndex{1, 1});
    // right/bottom scene edge clamps to the last cell
    CHECK(to_grid({1920, 1080}, kGrid) == CellIndex{63, 35});
}

TEST_CASE("re-gridding a produced cell center is stable") {
    Rng rng(99);
    for (int i = 0; i < 200; ++i) {
        const Vec2 p{rng.uniform(0.0, kScene.width), rng.uniform(0.0, kScene.height)};
        const CellIndex c = to_grid(p, kGrid);
        CHECK(to_grid(kGrid.cell_center(c), kGrid) == c);
    }
}

TEST_CASE("grid trajectory mirrors the source frames") {
    const RawTrajectory t =
        testing::walk_cells(4, 10, {{0, 0}, {1, 0}, {2, 0}, {2, 1}}, kGrid);
    const GridTrajectory g = to_grid(t, kGrid);
    REQUIRE(g.cells.size() == t.points.size());
    CHECK(g.pedestrian_id == 4);
    for (size_t i = 0; i < g.cells.size(); ++i) {
        CHECK(g.cells[i].frame == t.points[i].frame);
        CHECK(g.cells[i].cell == to_grid(t.points[i].pos, kGrid));
    }
}

TEST_CASE("occupancy_at deduplicates and validates the frame") {
    std::vector<RawTrajectory> ts;
    ts.push_back(testing::stand_at(1, 0, {3, 3}, 5, kGrid));
    ts.push_back(testing::stand_at(2, 0, {3, 3}, 5, kGrid));   // same cell
    ts.push_back(testing::stand_at(3, 2, {10, 9}, 5, kGrid));  // appears later
    const TrajectoryStore store(ts, kScene);

    CHECK(occupancy_at(store, 0, kGrid) == std::vector<CellIndex>{{3, 3}});
    CHECK(occupancy_at(store, 3, kGrid) == std::vector<CellIndex>{{3, 3}, {10, 9}});
    CHECK(occupancy_at(store, 5, kGrid) == std::vector<CellIndex>{{10, 9}});
    CHECK_THROWS_AS(occupancy_at(store, 7, kGrid), ValidationError);
    CHECK_THROWS_AS(occupancy_at(store, -1, kGrid), ValidationError);

    // brute-force cross-check at the first frame
    std::vector<CellIndex> manual;
    for (const RawTrajectory& t : store.trajectories()) {
        if (const TrajectoryPoint* p = t.at_frame(store.min_frame())) {
            manual.push_back(to_grid(p->pos, kGrid));
        }
    }
    std::sort(manual.begin(), manual.end());
    manual.erase(std::unique(manual.begin(), manual.end()), manual.end());
    CHECK(occupancy_at(store, store.min_frame(), kGrid) == manual);
}

TEST_CASE("occupancy dedup can only shrink the point count") {
    SynthConfig cfg;
    cfg.pedestrians = 10;
    cfg.frames = 60;
    const TrajectoryStore store = synth_crowd(cfg, 5);
    size_t occupancy_sum = 0;
    for (int64_t f = store.min_frame(); f <= store.max_frame(); ++f) {
        occupancy_sum += occupancy_at(store, f, kGrid).size();
    }
    CHECK(occupancy_sum <= store.total_points());
}

TEST_CASE("save/load round-trips bit-identically") {
    SynthConfig cfg;
    cfg.pedestrians = 6;
    cfg.frames = 40;
    const TrajectoryStore store = synth_crowd(cfg, 21);
    std::ostringstream first;
    save_trajectories(store, first);
    std::istringstream back(first.str());
    const TrajectoryStore reloaded = load_trajectories(back, kScene);
    CHECK(reloaded == store);
    std::ostringstream second;
    save_trajectories(reloaded, second);
    CHECK(first.str() == second.str());
}

TEST_CASE("synth_crowd basics") {
    SynthConfig cfg;
    cfg.pedestrians = 0;
    cfg.frames = 50;
    CHECK(synth_crowd(cfg, 1).empty());

    cfg.pedestrians = 15;
    CHECK(synth_crowd(cfg, 9) == synth_crowd(cfg, 9));
    CHECK(!(synth_crowd(cfg, 9) == synth_crowd(cfg, 10)));

    const TrajectoryStore store = synth_crowd(cfg, 9);
    for (const RawTrajectory& t : store.trajectories()) {
        REQUIRE(t.length() >= 2);
        for (size_t i = 0; i < t.points.size(); ++i) {
            CHECK(kScene.contains(t.points[i].pos));
            if (i > 0) CHECK(t.points[i].frame == t.points[i - 1].frame + 1);
        }
    }
}

TEST_CASE("zero frames is an infeasible generator config") {
    SynthConfig cfg;
    cfg.frames = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("straight walker grids to consecutive cells") {
    const RawTrajectory t = make_straight_walker(1, {15, 15}, {30, 0}, 0, 100, kScene);
    const GridTrajectory g = to_grid(t, kGrid);
    REQUIRE(g.cells.size() >= 10);
    for (size_t i = 0; i < g.cells.size(); ++i) {
        CHECK(g.cells[i].cell == CellIndex{static_cast<int>(i), 0});
    }
    // stops before leaving the scene
    CHECK(kScene.contains(t.points.back().pos));
    CHECK(t.points.back().pos.x + 30 > kScene.width);
}

TEST_CASE("generator config parsing") {
    std::istringstream in(
        "# crowd\npedestrians = 8\nframes= 120\nseed =3\nstraight_fraction = 0.5\n"
        "loiter_fraction = 0.25\nspeed_px_mean = 40\nspeed_px_std = 5\nscene_x = 960\n"
        "scene_y = 540\n");
    const SynthConfig cfg = parse_synth_config(in);
    CHECK(cfg.pedestrians == 8);
    CHECK(cfg.frames == 120);
    CHECK(cfg.seed == 3);
    CHECK(cfg.straight_fraction == 0.5);
    CHECK(cfg.loiter_fraction == 0.25);
    CHECK(cfg.speed_px_mean == 40);
    CHECK(cfg.speed_px_std == 5);
    CHECK(cfg.scene.width == 960);
    CHECK(cfg.scene.height == 540);

    std::istringstream bad("pedestrians = 8\nwat = 9\n");
    CHECK_THROWS_WITH_AS(parse_synth_config(bad), doctest::Contains("line 2"), ParseError);
}

TEST_SUITE_END();
