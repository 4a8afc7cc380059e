#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "crowdnav/geometry.hpp"

namespace crowdnav {

struct TrajectoryPoint {
    int64_t frame = 0;
    Vec2 pos;
};

/// A pedestrian's pixel path. After ingestion normalization the frames are
/// consecutive (one frame apart) and all points lie inside the scene.
struct RawTrajectory {
    int64_t pedestrian_id = 0;
    std::vector<TrajectoryPoint> points;

    int64_t first_frame() const { return points.front().frame; }
    int64_t last_frame() const { return points.back().frame; }
    size_t length() const { return points.size(); }
    /// Point at an absolute frame, or nullptr if the trajectory does not cover it.
    const TrajectoryPoint* at_frame(int64_t frame) const;
};

struct GridTrajectoryPoint {
    int64_t frame = 0;
    CellIndex cell;
};

struct GridTrajectory {
    int64_t pedestrian_id = 0;
    std::vector<GridTrajectoryPoint> cells;
};

/// Counters reported by the loader. `input_trajectories` is the number of
/// distinct pedestrian ids seen in the file; `kept_trajectories` the number of
/// gap-free segments of length >= 2 that made it into the store.
struct LoadReport {
    size_t records = 0;
    size_t input_trajectories = 0;
    size_t kept_trajectories = 0;
    size_t gap_splits = 0;
    size_t dropped_short_segments = 0;
};

/// Immutable collection of trajectories for one recording. Safe to share
/// across concurrently running episodes once built.
class TrajectoryStore {
public:
    TrajectoryStore() = default;
    TrajectoryStore(std::vector<RawTrajectory> trajectories, SceneSpec scene);

    const std::vector<RawTrajectory>& trajectories() const { return trajectories_; }
    const SceneSpec& scene() const { return scene_; }
    const RawTrajectory* find(int64_t pedestrian_id) const;

    bool empty() const { return trajectories_.empty(); }
    size_t size() const { return trajectories_.size(); }
    size_t total_points() const;

    bool has_frames() const { return min_frame_ <= max_frame_; }
    int64_t min_frame() const { return min_frame_; }
    int64_t max_frame() const { return max_frame_; }

    friend bool operator==(const TrajectoryStore& a, const TrajectoryStore& b);

private:
    std::vector<RawTrajectory> trajectories_;  // sorted by pedestrian_id
    SceneSpec scene_;
    int64_t min_frame_ = 0;
    int64_t max_frame_ = -1;
};

/// Parse the plain-text trajectory format: one `pedestrian_id frame x y` record
/// per line, `#` comment lines ignored. Trajectories with frame gaps are split
/// into maximal gap-free segments; continuation segments receive fresh ids.
/// Malformed lines raise ParseError with the line number; out-of-bounds
/// coordinates raise ValidationError naming the pedestrian and frame.
TrajectoryStore load_trajectories(std::istream& in, const SceneSpec& scene,
                                  LoadReport* report = nullptr);
TrajectoryStore load_trajectories(const std::string& path, const SceneSpec& scene,
                                  LoadReport* report = nullptr);

/// Write the canonical form of the trajectory format (sorted by id then frame,
/// single-space separated, shortest round-trip float formatting).
void save_trajectories(const TrajectoryStore& store, std::ostream& out);
void save_trajectories(const TrajectoryStore& store, const std::string& path);

/// Keep only trajectories with at least `min_length` points. Input unmodified.
TrajectoryStore filter_min_length(const TrajectoryStore& store, size_t min_length = 10);

GridTrajectory to_grid(const RawTrajectory& traj, const GridSpec& grid);

/// Cells of every pedestrian active at `frame`, deduplicated and sorted.
std::vector<CellIndex> occupancy_at(const TrajectoryStore& store, int64_t frame,
                                    const GridSpec& grid);

}  // namespace crowdnav
