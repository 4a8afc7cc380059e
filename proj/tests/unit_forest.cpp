#include <doctest.h>

#include <sstream>

#include "crowdnav/forecast.hpp"
#include "crowdnav/forest.hpp"
#include "crowdnav/synth.hpp"
#include "support/oracles.hpp"

using namespace crowdnav;

TEST_SUITE_BEGIN("forest");

namespace {

// Windows with well-separated feature vectors and per-sample unique targets.
std::vector<TrainingWindow> toy_windows(size_t count, uint64_t seed) {
    Rng rng(seed);
    std::vector<TrainingWindow> out(count);
    for (size_t i = 0; i < count; ++i) {
        TrainingWindow& w = out[i];
        w.pedestrian_id = static_cast<int64_t>(i);
        w.frame = 4;
        for (size_t j = 0; j < kFeatureCount; ++j) {
            w.features[j] = static_cast<double>(i * 100 + j) + rng.uniform(0.0, 0.5);
        }
        for (size_t j = 0; j < kTargetCount; ++j) {
            w.targets[j] = static_cast<double>(i) + 0.01 * static_cast<double>(j);
        }
    }
    return out;
}

ForecastTargets mean_targets(const std::vector<TrainingWindow>& ws) {
    ForecastTargets m{};
    for (const TrainingWindow& w : ws) {
        for (size_t j = 0; j < kTargetCount; ++j) m[j] += w.targets[j];
    }
    for (double& v : m) v /= static_cast<double>(ws.size());
    return m;
}

std::string serialize(const RegressionForest& f) {
    std::ostringstream os(std::ios::binary);
    save_forest(os, f);
    return os.str();
}

}  // namespace

TEST_CASE("max_depth=0 collapses every tree to the sample mean") {
    const auto windows = toy_windows(20, 3);
    ForestParams p;
    p.tree_count = 4;
    p.max_depth = 0;
    p.bootstrap = false;
    const RegressionForest forest = fit_forest(windows, p, 99);

    const ForecastTargets mean = mean_targets(windows);
    for (const TrainingWindow& w : windows) {
        const ForecastTargets got = forest.predict(w.features);
        for (size_t j = 0; j < kTargetCount; ++j) {
            CHECK(got[j] == doctest::Approx(mean[j]).epsilon(1e-12));
        }
    }
    for (const RegressionTree& t : forest.trees) {
        REQUIRE(t.nodes.size() == 1);
        CHECK(t.nodes[0].feature == -1);
        CHECK(t.nodes[0].sample_count == windows.size());
    }
}

TEST_CASE("unbounded depth without bootstrap memorizes distinct samples") {
    const auto windows = toy_windows(50, 11);
    ForestParams p;
    p.tree_count = 3;
    p.max_depth = -1;
    p.min_samples_leaf = 1;
    p.bootstrap = false;
    const RegressionForest forest = fit_forest(windows, p, 7);

    for (const TrainingWindow& w : windows) {
        const ForecastTargets got = forest.predict(w.features);
        for (size_t j = 0; j < kTargetCount; ++j) {
            CHECK(got[j] == doctest::Approx(w.targets[j]).epsilon(1e-12));
        }
    }
}

TEST_CASE("refitting with the same seed is bit-identical") {
    const auto windows = toy_windows(30, 5);
    ForestParams p;
    p.tree_count = 5;
    const RegressionForest a = fit_forest(windows, p, 1234);
    const RegressionForest b = fit_forest(windows, p, 1234);
    CHECK(serialize(a) == serialize(b));

    const RegressionForest c = fit_forest(windows, p, 1235);
    CHECK(serialize(a) != serialize(c));
}

TEST_CASE("forest prediction is the componentwise mean over trees") {
    const auto windows = toy_windows(40, 8);
    ForestParams p;
    p.tree_count = 2;
    const RegressionForest forest = fit_forest(windows, p, 21);
    REQUIRE(forest.trees.size() == 2);

    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        FeatureVector f;
        for (double& v : f) v = rng.uniform(0, 4000);
        const ForecastTargets got = forest.predict(f);
        const ForecastTargets& t0 = forest.trees[0].predict(f);
        const ForecastTargets& t1 = forest.trees[1].predict(f);
        for (size_t j = 0; j < kTargetCount; ++j) {
            CHECK(got[j] == doctest::Approx((t0[j] + t1[j]) / 2.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("serialization round-trips bit-exactly") {
    const auto windows = toy_windows(25, 2);
    ForestParams p;
    p.tree_count = 4;
    p.max_depth = 6;
    p.min_samples_leaf = 2;
    const RegressionForest forest = fit_forest(windows, p, 55);

    const std::string bytes = serialize(forest);
    std::istringstream is(bytes, std::ios::binary);
    const RegressionForest loaded = load_forest(is);

    CHECK(loaded.params.tree_count == p.tree_count);
    CHECK(loaded.params.max_depth == p.max_depth);
    CHECK(loaded.params.min_samples_leaf == p.min_samples_leaf);
    CHECK(loaded.params.features_per_split == p.features_per_split);
    CHECK(loaded.params.bootstrap == p.bootstrap);
    CHECK(loaded.seed == 55);
    CHECK(serialize(loaded) == bytes);

    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        FeatureVector f;
        for (double& v : f) v = rng.uniform(0, 4000);
        CHECK(forest.predict(f) == loaded.predict(f));
    }
}

TEST_CASE("loading rejects foreign or truncated files") {
    std::istringstream junk("not a forest at all", std::ios::binary);
    CHECK_THROWS_AS(load_forest(junk), ParseError);

    const auto windows = toy_windows(10, 1);
    ForestParams p;
    p.tree_count = 2;
    const std::string bytes = serialize(fit_forest(windows, p, 9));
    std::istringstream cut(bytes.substr(0, bytes.size() / 2), std::ios::binary);
    CHECK_THROWS_AS(load_forest(cut), ParseError);
}

TEST_CASE("every leaf holds at least min_samples_leaf samples") {
    const auto windows = toy_windows(60, 13);
    for (int msl : {1, 3, 7}) {
        ForestParams p;
        p.tree_count = 6;
        p.min_samples_leaf = msl;
        const RegressionForest forest = fit_forest(windows, p, 40);
        for (const RegressionTree& t : forest.trees) {
            REQUIRE(!t.nodes.empty());
            for (const TreeNode& n : t.nodes) {
                if (n.feature == -1) {
                    CHECK(n.sample_count >= static_cast<uint64_t>(msl));
                } else {
                    REQUIRE(n.left >= 0);
                    REQUIRE(n.right >= 0);
                    REQUIRE(n.left < static_cast<int32_t>(t.nodes.size()));
                    REQUIRE(n.right < static_cast<int32_t>(t.nodes.size()));
                    CHECK(n.sample_count == t.nodes[static_cast<size_t>(n.left)].sample_count +
                                                t.nodes[static_cast<size_t>(n.right)].sample_count);
                }
            }
        }
    }
}

TEST_CASE("fit rejects degenerate inputs") {
    ForestParams p;
    CHECK_THROWS_AS(fit_forest({}, p, 0), ValidationError);

    ForestParams bad;
    bad.tree_count = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = ForestParams{};
    bad.min_samples_leaf = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = ForestParams{};
    bad.features_per_split = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("forest beats the standing-still baseline on straight walkers") {
    // Constant-velocity walkers: the true continuation is linear in the
    // features, persistence is maximally wrong.
    SynthConfig cfg;
    cfg.pedestrians = 14;
    cfg.frames = 90;
    cfg.seed = 6;
    cfg.straight_fraction = 1.0;
    cfg.loiter_fraction = 0.0;
    const TrajectoryStore store = synth_crowd(cfg);
    const std::vector<TrainingWindow> windows = build_training_windows(store);
    REQUIRE(windows.size() > 200);

    ForestParams p;
    p.tree_count = 10;
    const RegressionForest forest = fit_forest(windows, p, 3);

    const SceneSpec scene = store.scene();
    std::vector<Vec2> pred, persist, truth;
    for (const TrainingWindow& w : windows) {
        const Vec2 origin{w.features[8], w.features[9]};
        const ForecastTargets got = forest.predict(w.features);
        for (int k = 0; k < kHorizon; ++k) {
            pred.push_back(origin + Vec2{got[static_cast<size_t>(2 * k)],
                                         got[static_cast<size_t>(2 * k + 1)]});
            persist.push_back(origin);
            truth.push_back(origin + Vec2{w.targets[static_cast<size_t>(2 * k)],
                                          w.targets[static_cast<size_t>(2 * k + 1)]});
        }
    }
    const double forest_err = nmse(pred, truth, scene);
    const double persist_err = nmse(persist, truth, scene);
    CHECK(forest_err < persist_err);
    CHECK(forest_err < 0.5 * persist_err);
}

TEST_SUITE_END();
