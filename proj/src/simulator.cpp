#include "crowdnav/simulator.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace crowdnav {

std::string to_string(CollisionType t) {
    switch (t) {
        case CollisionType::SR: return "SR";
        case CollisionType::SP: return "SP";
        case CollisionType::MRP: return "MRP";
    }
    return "?";
}

std::optional<CollisionType> parse_collision_type(std::string_view s) {
    if (s == "SR") return CollisionType::SR;
    if (s == "SP") return CollisionType::SP;
    if (s == "MRP") return CollisionType::MRP;
    return std::nullopt;
}

std::optional<CollisionType> classify_collision(bool robot_moved, bool ped_moved) {
    if (!robot_moved && !ped_moved) return std::nullopt;
    if (!robot_moved) return CollisionType::SR;
    if (!ped_moved) return CollisionType::SP;
    return CollisionType::MRP;
}

void validate_episode(const Episode& ep, const TrajectoryStore& store, const GridSpec& grid) {
    if (!grid.in_bounds(ep.start) || !grid.in_bounds(ep.goal)) {
        throw ValidationError("episode start/goal out of bounds");
    }
    if (ep.start == ep.goal) throw ValidationError("episode start equals goal");
    if (!store.has_frames() || ep.start_frame < store.min_frame() ||
        ep.start_frame >= store.max_frame()) {
        throw ValidationError("episode start_frame outside recording range");
    }
}

FrameIndex::FrameIndex(const TrajectoryStore& store) : store_(&store) {
    min_frame_ = store.has_frames() ? store.min_frame() : 0;
    const int64_t span = store.has_frames() ? store.max_frame() - min_frame_ + 1 : 0;
    by_frame_.resize(static_cast<size_t>(span));
    const auto& trajs = store.trajectories();
    for (size_t i = 0; i < trajs.size(); ++i) {
        for (int64_t f = trajs[i].first_frame(); f <= trajs[i].last_frame(); ++f) {
            by_frame_[static_cast<size_t>(f - min_frame_)].push_back(i);
        }
    }
}

const std::vector<size_t>& FrameIndex::active_at(int64_t frame) const {
    const int64_t k = frame - min_frame_;
    if (k < 0 || k >= static_cast<int64_t>(by_frame_.size())) return none_;
    return by_frame_[static_cast<size_t>(k)];
}

std::vector<CellIndex> FrameIndex::occupied_cells(int64_t frame, const GridSpec& grid) const {
    std::vector<CellIndex> cells;
    for (size_t i : active_at(frame)) {
        const RawTrajectory& t = store_->trajectories()[i];
        cells.push_back(to_grid(t.at_frame(frame)->pos, grid));
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
}

int64_t optimal_steps(CellIndex start, CellIndex goal, const GridSpec& grid) {
    if (!grid.in_bounds(start) || !grid.in_bounds(goal)) {
        throw ValidationError("optimal_steps: cell out of bounds");
    }
    return chebyshev(start, goal);
}

double delay(int64_t t, int64_t t_hat) {
    if (t < 1) throw ValidationError("delay undefined for optimal step count 0");
    if (t_hat < t) throw ValidationError("steps taken below the optimum is impossible");
    return static_cast<double>(t_hat - t) * 100.0 / static_cast<double>(t);
}

EpisodeResult run_episode(Controller& controller, const Episode& ep, const TrajectoryStore& store,
                          const FrameIndex& index, const GridSpec& grid,
                          const EpisodeOptions& opts) {
    validate_episode(ep, store, grid);

    EpisodeResult result;
    result.optimal_steps = optimal_steps(ep.start, ep.goal, grid);
    const int64_t cap =
        opts.max_steps > 0 ? opts.max_steps : kMaxStepFactor * result.optimal_steps + kMaxStepSlack;

    controller.begin_episode(ep, store, grid);

    CellIndex robot = ep.start;
    int64_t frame = ep.start_frame;
    result.robot_path.push_back(robot);

    while (result.steps_taken < cap && frame + 1 <= store.max_frame() && !result.reached_goal) {
        SimulationView view;
        view.tick = result.steps_taken + 1;
        view.frame = frame;
        view.robot = robot;
        view.goal = ep.goal;
        view.store = &store;
        view.index = &index;
        view.grid = &grid;
        view.occupied = index.occupied_cells(frame, grid);

        ControllerDecision decision;
        try {
            decision = controller.decide(view);
        } catch (const std::exception&) {
            result.aborted = true;
            break;
        }
        const CellIndex target = decision.target;
        if (!grid.in_bounds(target) || chebyshev(robot, target) > 1) {
            result.aborted = true;
            break;
        }
        if (decision.stalled) ++result.stall_ticks;

        // Pedestrians and robot advance together; the new frame is the state
        // both must survive.
        const CellIndex robot_prev = robot;
        robot = target;
        frame += 1;
        ++result.steps_taken;
        result.robot_path.push_back(robot);

        const bool robot_moved = robot != robot_prev;
        for (size_t i : index.active_at(frame)) {
            const RawTrajectory& t = store.trajectories()[i];
            const CellIndex cell_now = to_grid(t.at_frame(frame)->pos, grid);
            if (cell_now != robot) continue;

            const TrajectoryPoint* prev = t.at_frame(frame - 1);
            const bool existed = prev != nullptr;
            const CellIndex cell_prev = existed ? to_grid(prev->pos, grid) : CellIndex{-1, -1};
            if (existed && cell_prev == robot_prev) continue;  // overlap persisted, not created

            const bool ped_moved = !existed || cell_prev != cell_now;
            const auto type = classify_collision(robot_moved, ped_moved);
            if (!type) continue;

            CollisionEvent ev;
            ev.tick = result.steps_taken;
            ev.frame = frame;
            ev.cell = robot;
            ev.type = *type;
            ev.pedestrian_id = t.pedestrian_id;
            result.events.push_back(ev);
            switch (*type) {
                case CollisionType::SR: ++result.sr; break;
                case CollisionType::SP: ++result.sp; break;
                case CollisionType::MRP: ++result.mrp; break;
            }
        }

        if (robot == ep.goal) result.reached_goal = true;
    }

    if (result.reached_goal) {
        result.delay_percent = delay(result.optimal_steps, result.steps_taken);
    }
    return result;
}

EpisodeResult run_episode(Controller& controller, const Episode& ep, const TrajectoryStore& store,
                          const GridSpec& grid, const EpisodeOptions& opts) {
    FrameIndex index(store);
    return run_episode(controller, ep, store, index, grid, opts);
}

void write_event_log(std::ostream& os, const Episode& ep, const EpisodeResult& result) {
    os << "tick,frame,robot_col,robot_row,event_type,pedestrian_id\n";
    size_t next_event = 0;
    for (size_t k = 0; k < result.robot_path.size(); ++k) {
        const int64_t tick = static_cast<int64_t>(k);
        const int64_t frame = ep.start_frame + tick;
        const CellIndex robot = result.robot_path[k];
        bool wrote = false;
        while (next_event < result.events.size() && result.events[next_event].tick == tick) {
            const CollisionEvent& ev = result.events[next_event++];
            os << tick << ',' << frame << ',' << robot.col << ',' << robot.row << ','
               << to_string(ev.type) << ',' << ev.pedestrian_id << '\n';
            wrote = true;
        }
        if (!wrote) {
            os << tick << ',' << frame << ',' << robot.col << ',' << robot.row << ",none,-1\n";
        }
    }
}

std::vector<EventLogRow> load_event_log(std::istream& is) {
    std::vector<EventLogRow> rows;
    std::string line;
    size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string_view stripped = trim(line);
        if (stripped.empty()) continue;
        if (!saw_header) {
            if (stripped != "tick,frame,robot_col,robot_row,event_type,pedestrian_id") {
                throw ParseError("event log: unexpected header");
            }
            saw_header = true;
            continue;
        }
        const auto fields = split_on(stripped, ',');
        if (fields.size() != 6) {
            throw ParseError("event log line " + std::to_string(line_no) + ": expected 6 fields");
        }
        EventLogRow row;
        int64_t col = 0;
        int64_t r = 0;
        if (!parse_i64(fields[0], row.tick) || !parse_i64(fields[1], row.frame) ||
            !parse_i64(fields[2], col) || !parse_i64(fields[3], r) ||
            !parse_i64(fields[5], row.pedestrian_id)) {
            throw ParseError("event log line " + std::to_string(line_no) + ": bad numeric field");
        }
        row.robot = {static_cast<int>(col), static_cast<int>(r)};
        row.event_type = std::string(fields[4]);
        if (row.event_type != "none" && !parse_collision_type(row.event_type)) {
            throw ParseError("event log line " + std::to_string(line_no) + ": unknown event type");
        }
        rows.push_back(std::move(row));
    }
    if (!saw_header) throw ParseError("event log: missing header");
    return rows;
}

std::vector<EventLogRow> load_event_log(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open event log: " + path);
    return load_event_log(is);
}

std::vector<Episode> make_episodes(const TrajectoryStore& store, const GridSpec& grid, int64_t n,
                                   uint64_t seed, const EpisodeSampling& sampling) {
    if (n < 0) throw ValidationError("episode count must be >= 0");
    if (n == 0) return {};
    if (!store.has_frames() || store.max_frame() <= store.min_frame()) {
        throw ValidationError("recording too short to host an episode");
    }
    const int64_t remaining = std::max<int64_t>(sampling.min_remaining_frames, 1);
    const int64_t last_start = store.max_frame() - remaining;
    if (last_start < store.min_frame()) {
        throw ValidationError("recording too short for the requested remaining-frame margin");
    }

    FrameIndex index(store);
    Rng rng(derive_seed(seed, 0xE715));
    std::vector<Episode> episodes;
    std::set<std::tuple<int, int, int, int, int64_t>> used;
    const int64_t frame_span = last_start - store.min_frame() + 1;
    const uint64_t cells = static_cast<uint64_t>(grid.cell_count());

    int64_t failures = 0;
    const int64_t max_failures = std::max<int64_t>(100000, 2000 * n);
    while (static_cast<int64_t>(episodes.size()) < n) {
        if (failures > max_failures) {
            throw ValidationError("cannot sample the requested number of distinct episodes");
        }
        const CellIndex start = grid.cell_at(static_cast<int>(rng.uniform_index(cells)));
        const CellIndex goal = grid.cell_at(static_cast<int>(rng.uniform_index(cells)));
        const int64_t frame =
            store.min_frame() + static_cast<int64_t>(rng.uniform_index(static_cast<uint64_t>(frame_span)));
        if (start == goal) {
            ++failures;
            continue;
        }
        const auto occupied = index.occupied_cells(frame, grid);
        if (std::binary_search(occupied.begin(), occupied.end(), start)) {
            ++failures;
            continue;
        }
        if (!used.insert({start.col, start.row, goal.col, goal.row, frame}).second) {
            ++failures;
            continue;
        }
        Episode ep;
        ep.start = start;
        ep.goal = goal;
        ep.start_frame = frame;
        ep.seed = derive_seed(seed, static_cast<uint64_t>(episodes.size()));
        episodes.push_back(ep);
    }
    return episodes;
}

}  // namespace crowdnav
