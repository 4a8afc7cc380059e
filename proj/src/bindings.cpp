#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "crowdnav/benchmark.hpp"
#include "crowdnav/cli.hpp"
#include "crowdnav/dstar.hpp"
#include "crowdnav/forest.hpp"
#include "crowdnav/synth.hpp"

namespace py = pybind11;
using namespace crowdnav;

namespace {

std::array<Vec2, kHistoryLen> to_history(const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() != kHistoryLen) {
        throw ValidationError("history must contain exactly 5 points");
    }
    std::array<Vec2, kHistoryLen> h;
    for (size_t i = 0; i < h.size(); ++i) h[i] = Vec2{pts[i].first, pts[i].second};
    return h;
}

std::vector<CellIndex> to_cells(const std::vector<std::pair<int, int>>& cells) {
    std::vector<CellIndex> out;
    out.reserve(cells.size());
    for (auto [c, r] : cells) out.push_back(CellIndex{c, r});
    return out;
}

RegressionForest fit_forest_py(const std::vector<std::vector<double>>& features,
                               const std::vector<std::vector<double>>& targets, int trees,
                               int max_depth, int min_samples_leaf, bool bootstrap,
                               uint64_t seed) {
    if (features.size() != targets.size() || features.empty()) {
        throw ValidationError("features and targets must be nonempty and the same length");
    }
    std::vector<TrainingWindow> windows(features.size());
    for (size_t i = 0; i < features.size(); ++i) {
        if (features[i].size() != kFeatureCount || targets[i].size() != kTargetCount) {
            throw ValidationError("each sample needs 31 features and 10 targets");
        }
        std::copy(features[i].begin(), features[i].end(), windows[i].features.begin());
        std::copy(targets[i].begin(), targets[i].end(), windows[i].targets.begin());
    }
    ForestParams params;
    params.tree_count = trees;
    params.max_depth = max_depth;
    params.min_samples_leaf = min_samples_leaf;
    params.bootstrap = bootstrap;
    return fit_forest(windows, params, seed);
}

std::vector<double> forest_predict_py(const RegressionForest& forest,
                                      const std::vector<double>& features) {
    if (features.size() != kFeatureCount) throw ValidationError("expected 31 features");
    FeatureVector x;
    std::copy(features.begin(), features.end(), x.begin());
    const ForecastTargets y = forest.predict(x);
    return std::vector<double>(y.begin(), y.end());
}

}  // namespace

PYBIND11_MODULE(_crowdnav, m) {
    m.doc() = "crowd navigation benchmark core";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NoPathError>(m, "NoPathError", PyExc_RuntimeError);

    m.def("version", [] { return std::string(kVersion); });

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out;
            std::ostringstream err;
            const int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run a CLI command; returns (exit_code, stdout, stderr).");

    m.def(
        "chebyshev",
        [](int col_a, int row_a, int col_b, int row_b) {
            return chebyshev(CellIndex{col_a, row_a}, CellIndex{col_b, row_b});
        },
        py::arg("col_a"), py::arg("row_a"), py::arg("col_b"), py::arg("row_b"));

    m.def(
        "extract_features",
        [](const std::vector<std::pair<double, double>>& history) {
            const FeatureVector f = extract_features(to_history(history));
            return std::vector<double>(f.begin(), f.end());
        },
        py::arg("history"), "31-dimensional feature vector from 5 consecutive positions.");

    m.def(
        "nmse",
        [](const std::vector<std::pair<double, double>>& pred,
           const std::vector<std::pair<double, double>>& truth, double scene_w, double scene_h) {
            std::vector<Vec2> p;
            std::vector<Vec2> t;
            for (auto [x, y] : pred) p.push_back(Vec2{x, y});
            for (auto [x, y] : truth) t.push_back(Vec2{x, y});
            return nmse(p, t, SceneSpec{scene_w, scene_h});
        },
        py::arg("predictions"), py::arg("truths"), py::arg("scene_w"), py::arg("scene_h"));

    py::class_<RegressionForest>(m, "Forest")
        .def_static("fit", &fit_forest_py, py::arg("features"), py::arg("targets"),
                    py::arg("trees") = 25, py::arg("max_depth") = -1,
                    py::arg("min_samples_leaf") = 5, py::arg("bootstrap") = true,
                    py::arg("seed") = 0)
        .def_static("load", [](const std::string& path) { return load_forest(path); },
                    py::arg("path"))
        .def("save", [](const RegressionForest& f, const std::string& path) { save_forest(path, f); },
             py::arg("path"))
        .def("predict", &forest_predict_py, py::arg("features"))
        .def_property_readonly("tree_count",
                               [](const RegressionForest& f) { return f.trees.size(); });

    py::class_<DStarPlanner>(m, "Planner")
        .def(py::init([](int cols, int rows, std::pair<int, int> start, std::pair<int, int> goal,
                         const std::vector<std::pair<int, int>>& blocked) {
                 SceneSpec scene;
                 const GridSpec grid = GridSpec::from_scene(scene, cols, rows);
                 return DStarPlanner(grid, CellIndex{start.first, start.second},
                                     CellIndex{goal.first, goal.second}, to_cells(blocked));
             }),
             py::arg("cols"), py::arg("rows"), py::arg("start"), py::arg("goal"),
             py::arg("blocked") = std::vector<std::pair<int, int>>{})
        .def("set_start",
             [](DStarPlanner& p, std::pair<int, int> s) {
                 p.set_start(CellIndex{s.first, s.second});
             })
        .def("set_blocked",
             [](DStarPlanner& p, const std::vector<std::pair<int, int>>& cells) {
                 p.set_blocked(to_cells(cells));
             })
        .def("compute", &DStarPlanner::compute_shortest_path)
        .def("next_move",
             [](const DStarPlanner& p) {
                 const CellIndex c = p.next_move();
                 return std::make_pair(c.col, c.row);
             })
        .def("path_cost", &DStarPlanner::path_cost)
        .def_property_readonly("expansions", &DStarPlanner::expansions);
}
