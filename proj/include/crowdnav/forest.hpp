#pragma once

#include <iosfwd>

#include "crowdnav/features.hpp"

namespace crowdnav {

struct ForestParams {
    int tree_count = 100;
    int max_depth = -1;  // -1 = unbounded
    int min_samples_leaf = 5;
    int features_per_split = (kFeatureCount + 2) / 3;
    bool bootstrap = true;

    void validate() const;
};

struct TreeNode {
    int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int32_t left = -1;
    int32_t right = -1;
    uint64_t sample_count = 0;
    ForecastTargets leaf{};
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  // root at index 0

    const ForecastTargets& predict(const FeatureVector& f) const;
};

struct RegressionForest {
    ForestParams params;
    uint64_t seed = 0;
    std::vector<RegressionTree> trees;

    ForecastTargets predict(const FeatureVector& f) const;
};

// CART with multi-output variance reduction. Bootstrap resampling and the
// per-split feature subsample are driven by per-tree seeds derived from
// `seed`, so refitting with the same data and seed is bit-identical. The
// split search keeps inspecting features past the subsample size until it
// finds a valid partition (or proves there is none), so nodes only become
// leaves when they are genuinely unsplittable.
RegressionForest fit_forest(const std::vector<TrainingWindow>& samples, const ForestParams& params,
                            uint64_t seed);

void save_forest(std::ostream& os, const RegressionForest& forest);
void save_forest(const std::string& path, const RegressionForest& forest);
RegressionForest load_forest(std::istream& is);
RegressionForest load_forest(const std::string& path);

}  // namespace crowdnav
