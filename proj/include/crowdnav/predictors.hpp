#pragma once

#include <memory>
#include <unordered_map>

#include "crowdnav/forecast.hpp"
#include "crowdnav/forest.hpp"
#include "crowdnav/simulator.hpp"

namespace crowdnav {

// Produces the occupancy forecast for frames view.frame+1 .. view.frame+5.
// Implementations are immutable after construction and shareable across
// concurrently running episodes.
class Predictor {
public:
    virtual ~Predictor() = default;
    virtual std::string name() const = 0;
    virtual OccupancyForecast forecast(const SimulationView& view) const = 0;
};

/// Chebyshev-ball neighborhood of every currently occupied cell, asserted at
/// every horizon step.
class BaselinePredictor : public Predictor {
public:
    explicit BaselinePredictor(int radius = 1) : radius_(radius) {}
    std::string name() const override;
    OccupancyForecast forecast(const SimulationView& view) const override;

private:
    int radius_;
};

/// Ground-truth oracle: the recorded cells of the next five frames.
class PerfectPredictor : public Predictor {
public:
    std::string name() const override { return "perfect"; }
    OccupancyForecast forecast(const SimulationView& view) const override;
};

/// Regression-forest forecasts, precomputed for every (trajectory, frame)
/// window of the store at construction time. Pedestrians with fewer than 5
/// observed frames fall back to the baseline ball.
class ForestPredictor : public Predictor {
public:
    ForestPredictor(const RegressionForest& forest, const TrajectoryStore& store,
                    const GridSpec& grid, int fallback_radius = 1);
    std::string name() const override { return "forest"; }
    OccupancyForecast forecast(const SimulationView& view) const override;

private:
    int fallback_radius_;
    // cells_[traj][frame - (first_frame+4)] = predicted cell per horizon step
    std::vector<std::vector<std::array<CellIndex, kHorizon>>> cells_;
};

/// Forecasts ingested from a file keyed by (pedestrian_id, frame); pedestrians
/// without a record fall back to the baseline ball.
class ExternalPredictor : public Predictor {
public:
    ExternalPredictor(ExternalForecasts data, int fallback_radius = 1)
        : fallback_radius_(fallback_radius), data_(std::move(data)) {}
    std::string name() const override { return "external"; }
    OccupancyForecast forecast(const SimulationView& view) const override;

private:
    int fallback_radius_;
    ExternalForecasts data_;
};

}  // namespace crowdnav
