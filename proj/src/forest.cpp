#include "crowdnav/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

namespace crowdnav {

void ForestParams::validate() const {
    if (tree_count < 1) throw ValidationError("forest needs at least one tree");
    if (max_depth < -1) throw ValidationError("max_depth must be -1 (unbounded) or >= 0");
    if (min_samples_leaf < 1) throw ValidationError("min_samples_leaf must be >= 1");
    if (features_per_split < 1 || features_per_split > kFeatureCount) {
        throw ValidationError("features_per_split must be in [1, 31]");
    }
}

const ForecastTargets& RegressionTree::predict(const FeatureVector& f) const {
    int32_t i = 0;
    while (nodes[static_cast<size_t>(i)].feature >= 0) {
        const TreeNode& n = nodes[static_cast<size_t>(i)];
        i = (f[static_cast<size_t>(n.feature)] <= n.threshold) ? n.left : n.right;
    }
    return nodes[static_cast<size_t>(i)].leaf;
}

ForecastTargets RegressionForest::predict(const FeatureVector& f) const {
    ForecastTargets sum{};
    for (const RegressionTree& t : trees) {
        const ForecastTargets& v = t.predict(f);
        for (int d = 0; d < kTargetCount; ++d) sum[static_cast<size_t>(d)] += v[static_cast<size_t>(d)];
    }
    for (double& v : sum) v /= static_cast<double>(trees.size());
    return sum;
}

namespace {

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    size_t left_count = 0;
    double proxy = -std::numeric_limits<double>::infinity();
};

struct TreeBuilder {
    const std::vector<TrainingWindow>& samples;
    const ForestParams& params;
    Rng rng;
    std::vector<TreeNode> nodes;
    std::vector<size_t> index;      // sample ids, permuted in place during build
    std::vector<double> sort_keys;  // scratch, |index| sized

    TreeBuilder(const std::vector<TrainingWindow>& s, const ForestParams& p, uint64_t tree_seed)
        : samples(s), params(p), rng(tree_seed) {}

    ForecastTargets mean_of(size_t begin, size_t end) const {
        ForecastTargets m{};
        for (size_t i = begin; i < end; ++i) {
            const ForecastTargets& t = samples[index[i]].targets;
            for (int d = 0; d < kTargetCount; ++d) m[static_cast<size_t>(d)] += t[static_cast<size_t>(d)];
        }
        for (double& v : m) v /= static_cast<double>(end - begin);
        return m;
    }

    bool targets_constant(size_t begin, size_t end) const {
        const ForecastTargets& first = samples[index[begin]].targets;
        for (size_t i = begin + 1; i < end; ++i) {
            if (samples[index[i]].targets != first) return false;
        }
        return true;
    }

    // Best min_samples_leaf-respecting threshold on one feature, or found=false.
    SplitChoice scan_feature(int feat, size_t begin, size_t end) {
        const size_t n = end - begin;
        std::sort(index.begin() + static_cast<ptrdiff_t>(begin),
                  index.begin() + static_cast<ptrdiff_t>(end), [&](size_t a, size_t b) {
                      const double fa = samples[a].features[static_cast<size_t>(feat)];
                      const double fb = samples[b].features[static_cast<size_t>(feat)];
                      if (fa != fb) return fa < fb;
                      return a < b;
                  });

        SplitChoice best;
        best.feature = feat;
        ForecastTargets left_sum{};
        ForecastTargets total{};
        for (size_t i = begin; i < end; ++i) {
            const ForecastTargets& t = samples[index[i]].targets;
            for (int d = 0; d < kTargetCount; ++d) total[static_cast<size_t>(d)] += t[static_cast<size_t>(d)];
        }

        const size_t leaf_min = static_cast<size_t>(params.min_samples_leaf);
        for (size_t p = 1; p < n; ++p) {
            const ForecastTargets& t = samples[index[begin + p - 1]].targets;
            for (int d = 0; d < kTargetCount; ++d) left_sum[static_cast<size_t>(d)] += t[static_cast<size_t>(d)];

            if (p < leaf_min || n - p < leaf_min) continue;
            const double lo = samples[index[begin + p - 1]].features[static_cast<size_t>(feat)];
            const double hi = samples[index[begin + p]].features[static_cast<size_t>(feat)];
            if (lo == hi) continue;

            double proxy = 0.0;
            for (int d = 0; d < kTargetCount; ++d) {
                const double ls = left_sum[static_cast<size_t>(d)];
                const double rs = total[static_cast<size_t>(d)] - ls;
                proxy += ls * ls / static_cast<double>(p) + rs * rs / static_cast<double>(n - p);
            }
            if (proxy > best.proxy) {
                double thr = lo + (hi - lo) / 2.0;
                if (thr >= hi) thr = lo;  // keep the boundary strictly between the two values
                best.found = true;
                best.proxy = proxy;
                best.threshold = thr;
                best.left_count = p;
            }
        }
        return best;
    }

    int32_t build(size_t begin, size_t end, int depth) {
        const size_t n = end - begin;
        const int32_t id = static_cast<int32_t>(nodes.size());
        nodes.emplace_back();
        nodes.back().sample_count = n;

        const bool depth_ok = params.max_depth < 0 || depth < params.max_depth;
        const bool size_ok = n >= 2 * static_cast<size_t>(params.min_samples_leaf);
        if (depth_ok && size_ok && !targets_constant(begin, end)) {
            std::vector<int> order(kFeatureCount);
            std::iota(order.begin(), order.end(), 0);
            rng.shuffle(order);

            SplitChoice best;
            int inspected = 0;
            for (int feat : order) {
                if (inspected >= params.features_per_split && best.found) break;

                bool constant = true;
                const double f0 = samples[index[begin]].features[static_cast<size_t>(feat)];
                for (size_t i = begin + 1; i < end; ++i) {
                    if (samples[index[i]].features[static_cast<size_t>(feat)] != f0) {
                        constant = false;
                        break;
                    }
                }
                if (constant) continue;
                ++inspected;

                const SplitChoice s = scan_feature(feat, begin, end);
                if (s.found && s.proxy > best.proxy) best = s;
            }

            if (best.found) {
                // Re-establish the winning order (scan_feature for a later
                // feature may have permuted the range).
                scan_feature(best.feature, begin, end);
                const size_t mid = begin + best.left_count;
                nodes[static_cast<size_t>(id)].feature = best.feature;
                nodes[static_cast<size_t>(id)].threshold = best.threshold;
                const int32_t l = build(begin, mid, depth + 1);
                const int32_t r = build(mid, end, depth + 1);
                nodes[static_cast<size_t>(id)].left = l;
                nodes[static_cast<size_t>(id)].right = r;
                return id;
            }
        }

        nodes[static_cast<size_t>(id)].leaf = mean_of(begin, end);
        return id;
    }
};

}  // namespace

RegressionForest fit_forest(const std::vector<TrainingWindow>& samples, const ForestParams& params,
                            uint64_t seed) {
    params.validate();
    if (samples.empty()) throw ValidationError("fit_forest: empty training set");

    RegressionForest forest;
    forest.params = params;
    forest.seed = seed;
    forest.trees.resize(static_cast<size_t>(params.tree_count));

    const size_t n = samples.size();
    for (int t = 0; t < params.tree_count; ++t) {
        const uint64_t tree_seed = derive_seed(seed, static_cast<uint64_t>(t));
        TreeBuilder builder(samples, params, tree_seed);
        builder.index.resize(n);
        if (params.bootstrap) {
            for (size_t i = 0; i < n; ++i) builder.index[i] = builder.rng.uniform_index(n);
        } else {
            std::iota(builder.index.begin(), builder.index.end(), size_t{0});
        }
        builder.build(0, n, 0);
        forest.trees[static_cast<size_t>(t)].nodes = std::move(builder.nodes);
    }
    return forest;
}

// ---------------------------------------------------------------------------
// Serialization: "CNRF" magic, version, params, then per-tree node arrays.
// Internal nodes carry (feature, threshold, children); leaves carry the
// 10-vector. Doubles travel as raw IEEE bits, so round-trips are bit-exact.
// ---------------------------------------------------------------------------

namespace {
constexpr char kForestMagic[4] = {'C', 'N', 'R', 'F'};
constexpr uint32_t kForestVersion = 1;
}  // namespace

void save_forest(std::ostream& os, const RegressionForest& forest) {
    os.write(kForestMagic, 4);
    write_u32(os, kForestVersion);
    write_u32(os, static_cast<uint32_t>(forest.params.tree_count));
    write_u64(os, static_cast<uint64_t>(static_cast<int64_t>(forest.params.max_depth)));
    write_u32(os, static_cast<uint32_t>(forest.params.min_samples_leaf));
    write_u32(os, static_cast<uint32_t>(forest.params.features_per_split));
    write_u32(os, forest.params.bootstrap ? 1u : 0u);
    write_u64(os, forest.seed);
    write_u64(os, forest.trees.size());
    for (const RegressionTree& tree : forest.trees) {
        write_u64(os, tree.nodes.size());
        for (const TreeNode& n : tree.nodes) {
            write_u32(os, static_cast<uint32_t>(n.feature));
            write_u64(os, n.sample_count);
            if (n.feature >= 0) {
                write_f64(os, n.threshold);
                write_u32(os, static_cast<uint32_t>(n.left));
                write_u32(os, static_cast<uint32_t>(n.right));
            } else {
                for (double v : n.leaf) write_f64(os, v);
            }
        }
    }
    if (!os) throw ValidationError("forest write failed");
}

void save_forest(const std::string& path, const RegressionForest& forest) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot open forest file for writing: " + path);
    save_forest(os, forest);
}

RegressionForest load_forest(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kForestMagic, 4) != 0) {
        throw ParseError("not a forest model file (bad magic)");
    }
    const uint32_t version = read_u32(is);
    if (version != kForestVersion) {
        throw ParseError("unsupported forest model version " + std::to_string(version));
    }
    RegressionForest forest;
    forest.params.tree_count = static_cast<int>(read_u32(is));
    forest.params.max_depth = static_cast<int>(static_cast<int64_t>(read_u64(is)));
    forest.params.min_samples_leaf = static_cast<int>(read_u32(is));
    forest.params.features_per_split = static_cast<int>(read_u32(is));
    forest.params.bootstrap = read_u32(is) != 0;
    forest.seed = read_u64(is);
    forest.params.validate();

    const uint64_t tree_count = read_u64(is);
    if (tree_count == 0 || tree_count > (1u << 20)) throw ParseError("implausible tree count");
    forest.trees.resize(tree_count);
    for (RegressionTree& tree : forest.trees) {
        const uint64_t node_count = read_u64(is);
        if (node_count == 0 || node_count > (1ull << 31)) throw ParseError("implausible node count");
        tree.nodes.resize(node_count);
        for (TreeNode& n : tree.nodes) {
            n.feature = static_cast<int32_t>(read_u32(is));
            n.sample_count = read_u64(is);
            if (n.feature >= 0) {
                if (n.feature >= kFeatureCount) throw ParseError("node feature index out of range");
                n.threshold = read_f64(is);
                n.left = static_cast<int32_t>(read_u32(is));
                n.right = static_cast<int32_t>(read_u32(is));
                if (n.left < 0 || n.right < 0 ||
                    static_cast<uint64_t>(n.left) >= node_count ||
                    static_cast<uint64_t>(n.right) >= node_count) {
                    throw ParseError("node child index out of range");
                }
            } else if (n.feature == -1) {
                for (double& v : n.leaf) v = read_f64(is);
            } else {
                throw ParseError("bad node tag");
            }
        }
        if (!is) throw ParseError("truncated forest model file");
    }
    return forest;
}

RegressionForest load_forest(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot open forest file: " + path);
    return load_forest(is);
}

}  // namespace crowdnav
