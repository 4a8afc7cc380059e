#include "crowdnav/predictors.hpp"

#include "crowdnav/features.hpp"

namespace crowdnav {

namespace {

void add_ball(OccupancyForecast& f, CellIndex c, const GridSpec& grid, int radius) {
    const OccupancyForecast ball = baseline_forecast({c}, grid, radius);
    for (int k = 0; k < kHorizon; ++k) {
        auto& dst = f.steps[static_cast<size_t>(k)];
        const auto& src = ball.steps[static_cast<size_t>(k)];
        dst.insert(dst.end(), src.begin(), src.end());
    }
}

}  // namespace

std::string BaselinePredictor::name() const {
    return "baseline-r" + std::to_string(radius_);
}

OccupancyForecast BaselinePredictor::forecast(const SimulationView& view) const {
    return baseline_forecast(view.occupied, *view.grid, radius_);
}

OccupancyForecast PerfectPredictor::forecast(const SimulationView& view) const {
    OccupancyForecast f;
    for (int k = 1; k <= kHorizon; ++k) {
        f.steps[static_cast<size_t>(k - 1)] = view.index->occupied_cells(view.frame + k, *view.grid);
    }
    return f;
}

ForestPredictor::ForestPredictor(const RegressionForest& forest, const TrajectoryStore& store,
                                 const GridSpec& grid, int fallback_radius)
    : fallback_radius_(fallback_radius) {
    cells_.resize(store.size());
    for (size_t i = 0; i < store.size(); ++i) {
        const RawTrajectory& t = store.trajectories()[i];
        const int64_t first = t.first_frame() + (kHistoryLen - 1);
        if (t.last_frame() < first) continue;
        auto& per_frame = cells_[i];
        per_frame.reserve(static_cast<size_t>(t.last_frame() - first + 1));
        for (int64_t f = first; f <= t.last_frame(); ++f) {
            const auto hist = history_at(t, f);
            const ForecastTargets targets = forest.predict(extract_features(*hist));
            const OccupancyForecast fc = targets_to_forecast(targets, hist->back(), grid);
            std::array<CellIndex, kHorizon> row;
            for (int k = 0; k < kHorizon; ++k) row[static_cast<size_t>(k)] = fc.steps[static_cast<size_t>(k)].front();
            per_frame.push_back(row);
        }
    }
}

OccupancyForecast ForestPredictor::forecast(const SimulationView& view) const {
    OccupancyForecast f;
    for (size_t i : view.index->active_at(view.frame)) {
        const RawTrajectory& t = view.store->trajectories()[i];
        const int64_t offset = view.frame - (t.first_frame() + (kHistoryLen - 1));
        if (offset >= 0 && i < cells_.size() &&
            offset < static_cast<int64_t>(cells_[i].size())) {
            const auto& row = cells_[i][static_cast<size_t>(offset)];
            for (int k = 0; k < kHorizon; ++k) f.steps[static_cast<size_t>(k)].push_back(row[static_cast<size_t>(k)]);
        } else {
            add_ball(f, to_grid(t.at_frame(view.frame)->pos, *view.grid), *view.grid,
                     fallback_radius_);
        }
    }
    f.normalize();
    return f;
}

OccupancyForecast ExternalPredictor::forecast(const SimulationView& view) const {
    OccupancyForecast f;
    for (size_t i : view.index->active_at(view.frame)) {
        const RawTrajectory& t = view.store->trajectories()[i];
        const auto it = data_.by_id_frame.find({t.pedestrian_id, view.frame});
        if (it != data_.by_id_frame.end()) {
            const Vec2 origin = t.at_frame(view.frame)->pos;
            const OccupancyForecast fc = targets_to_forecast(it->second, origin, *view.grid);
            for (int k = 0; k < kHorizon; ++k) {
                f.steps[static_cast<size_t>(k)].push_back(fc.steps[static_cast<size_t>(k)].front());
            }
        } else {
            add_ball(f, to_grid(t.at_frame(view.frame)->pos, *view.grid), *view.grid,
                     fallback_radius_);
        }
    }
    f.normalize();
    return f;
}

}  // namespace crowdnav
