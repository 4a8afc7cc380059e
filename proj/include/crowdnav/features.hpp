#pragma once

#include <array>
#include <optional>
#include <vector>

#include "crowdnav/trajectory.hpp"

namespace crowdnav {

inline constexpr int kHistoryLen = 5;
inline constexpr int kHorizon = 5;
inline constexpr int kFeatureCount = 31;
inline constexpr int kTargetCount = 2 * kHorizon;

// Layout: absolute coords (10), step displacements (8), step speeds (4),
// mean speed (1), step accelerations (3), mean acceleration (1), step angles (4).
using FeatureVector = std::array<double, kFeatureCount>;

// (dx_t, dy_t) for t = 1..5, pixel displacements from the most recent position.
using ForecastTargets = std::array<double, kTargetCount>;

FeatureVector extract_features(const std::array<Vec2, kHistoryLen>& last5);

// Positions at frames f-4..f, or nullopt when the trajectory has fewer
// than 5 points up to and including f.
std::optional<std::array<Vec2, kHistoryLen>> history_at(const RawTrajectory& traj, int64_t frame);

struct TrainingWindow {
    int64_t pedestrian_id = 0;
    int64_t frame = 0;  // frame of the newest history point
    FeatureVector features{};
    ForecastTargets targets{};
};

std::vector<TrainingWindow> build_training_windows(const RawTrajectory& traj);
std::vector<TrainingWindow> build_training_windows(const TrajectoryStore& store);

struct SplitIndices {
    std::vector<size_t> train;
    std::vector<size_t> val;
    std::vector<size_t> test;
};

// Seeded shuffle of trajectory indices followed by an 80/10/10 cut (fractions
// configurable; train rounds first, validation second, the rest is test).
SplitIndices split_by_trajectory(size_t count, uint64_t seed, double train_frac = 0.8,
                                 double val_frac = 0.1);

}  // namespace crowdnav
