#pragma once

#include <memory>
#include <optional>

#include "crowdnav/trajectory.hpp"

namespace crowdnav {

enum class CollisionType { SR, SP, MRP };

std::string to_string(CollisionType t);
std::optional<CollisionType> parse_collision_type(std::string_view s);

/// Fig-8 style classification from the movement flags at the co-occupancy
/// tick. Both-stationary means the overlap already existed: no new event.
std::optional<CollisionType> classify_collision(bool robot_moved, bool ped_moved);

struct Episode {
    CellIndex start;
    CellIndex goal;
    int64_t start_frame = 0;
    uint64_t seed = 0;

    friend bool operator==(const Episode& a, const Episode& b) {
        return a.start == b.start && a.goal == b.goal && a.start_frame == b.start_frame &&
               a.seed == b.seed;
    }
};

void validate_episode(const Episode& ep, const TrajectoryStore& store, const GridSpec& grid);

/// Frame -> active trajectory indices, built once per store so per-tick
/// occupancy queries don't rescan every trajectory.
class FrameIndex {
public:
    explicit FrameIndex(const TrajectoryStore& store);

    const std::vector<size_t>& active_at(int64_t frame) const;
    std::vector<CellIndex> occupied_cells(int64_t frame, const GridSpec& grid) const;

private:
    const TrajectoryStore* store_;
    int64_t min_frame_ = 0;
    std::vector<std::vector<size_t>> by_frame_;
    std::vector<size_t> none_;
};

struct SimulationView {
    int64_t tick = 0;   // 1-based index of the step being decided
    int64_t frame = 0;  // frame the controller observes; the step lands on frame+1
    CellIndex robot;
    CellIndex goal;
    const TrajectoryStore* store = nullptr;
    const FrameIndex* index = nullptr;
    const GridSpec* grid = nullptr;
    std::vector<CellIndex> occupied;  // true pedestrian cells at `frame`, sorted
};

struct ControllerDecision {
    CellIndex target;      // current cell = stay
    bool stalled = false;  // planner had no path this tick
};

class Controller {
public:
    virtual ~Controller() = default;
    virtual std::string name() const = 0;
    virtual void begin_episode(const Episode& ep, const TrajectoryStore& store,
                               const GridSpec& grid) = 0;
    virtual ControllerDecision decide(const SimulationView& view) = 0;
};

struct CollisionEvent {
    int64_t tick = 0;
    int64_t frame = 0;
    CellIndex cell;
    CollisionType type = CollisionType::MRP;
    int64_t pedestrian_id = 0;
};

struct EpisodeResult {
    bool reached_goal = false;
    bool aborted = false;  // controller raised; episode reported failed
    int64_t steps_taken = 0;
    int64_t optimal_steps = 0;
    double delay_percent = 0.0;  // meaningful only when reached_goal
    int64_t sr = 0;
    int64_t sp = 0;
    int64_t mrp = 0;
    int64_t stall_ticks = 0;
    std::vector<CollisionEvent> events;
    std::vector<CellIndex> robot_path;  // [0] = start cell, then cell after each tick
};

/// Chebyshev distance: optimal step count on the empty grid.
int64_t optimal_steps(CellIndex start, CellIndex goal, const GridSpec& grid);

/// (t̂/t − 1)·100. t̂ < t is impossible for grid controllers and rejected.
double delay(int64_t t, int64_t t_hat);

inline constexpr int64_t kMaxStepFactor = 4;
inline constexpr int64_t kMaxStepSlack = 20;

struct EpisodeOptions {
    int64_t max_steps = 0;  // 0 = kMaxStepFactor * optimal + kMaxStepSlack
};

EpisodeResult run_episode(Controller& controller, const Episode& ep, const TrajectoryStore& store,
                          const FrameIndex& index, const GridSpec& grid,
                          const EpisodeOptions& opts = {});
EpisodeResult run_episode(Controller& controller, const Episode& ep, const TrajectoryStore& store,
                          const GridSpec& grid, const EpisodeOptions& opts = {});

// ---------------------------------------------------------------------------
// Per-episode event log (CSV: tick,frame,robot_col,robot_row,event_type,
// pedestrian_id). Ticks without events get one "none" row with id -1; tick 0
// records the start cell, so the robot path is fully reconstructable.
// ---------------------------------------------------------------------------

struct EventLogRow {
    int64_t tick = 0;
    int64_t frame = 0;
    CellIndex robot;
    std::string event_type = "none";
    int64_t pedestrian_id = -1;
};

void write_event_log(std::ostream& os, const Episode& ep, const EpisodeResult& result);
std::vector<EventLogRow> load_event_log(std::istream& is);
std::vector<EventLogRow> load_event_log(const std::string& path);

struct EpisodeSampling {
    /// Require at least this many frames after start_frame (0 = just enough
    /// for one tick). Keeps held-out evaluation from being dominated by
    /// recording exhaustion.
    int64_t min_remaining_frames = 0;
};

/// Deterministic rejection sampling of distinct episodes: start ≠ goal, start
/// cell unoccupied at start_frame, start_frame leaves room to step.
std::vector<Episode> make_episodes(const TrajectoryStore& store, const GridSpec& grid, int64_t n,
                                   uint64_t seed, const EpisodeSampling& sampling = {});

}  // namespace crowdnav
