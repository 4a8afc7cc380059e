#pragma once

#include <iosfwd>
#include <string>

#include "crowdnav/trajectory.hpp"

namespace crowdnav {

/// Generator parameters for desk-scale synthetic crowds. A "slot" keeps one
/// pedestrian alive at a time; straight walkers that leave the scene are
/// replaced by a fresh pedestrian (new id) in the same slot, so trajectory
/// count can exceed `pedestrians`.
struct SynthConfig {
    int pedestrians = 20;
    int64_t frames = 200;
    uint64_t seed = 0;
    double straight_fraction = 0.6;  // straight constant-velocity walkers; exit at bounds
    double loiter_fraction = 0.2;    // stationary pedestrians
    // remainder are random-waypoint walkers that live for the whole recording
    double speed_px_mean = 35.0;
    double speed_px_std = 10.0;
    SceneSpec scene;

    void validate() const;
};

/// Parse the key=value generator config format. Keys: pedestrians, frames,
/// seed, straight_fraction, loiter_fraction, speed_px_mean, speed_px_std, and
/// optional scene_x / scene_y overrides. `#` comments allowed.
SynthConfig parse_synth_config(std::istream& in);
SynthConfig load_synth_config(const std::string& path);

/// Deterministic given (config, seed). `seed` overrides config.seed.
TrajectoryStore synth_crowd(const SynthConfig& config, uint64_t seed);
inline TrajectoryStore synth_crowd(const SynthConfig& config) {
    return synth_crowd(config, config.seed);
}

/// Constant-velocity walk from `start`, one point per frame, stopping before
/// the first out-of-bounds point or after `max_frames` points.
RawTrajectory make_straight_walker(int64_t id, Vec2 start, Vec2 velocity_px_per_frame,
                                   int64_t start_frame, int64_t max_frames,
                                   const SceneSpec& scene);

/// Corridor fixture: pedestrians at fixed x positions sweep up and down the
/// full scene height at `speed_px` per frame (triangle wave), alternating
/// initial direction. Used for policy training scenarios.
TrajectoryStore make_crossing_corridor_store(const SceneSpec& scene,
                                             const std::vector<double>& crosser_x,
                                             double speed_px, int64_t frames);

}  // namespace crowdnav
