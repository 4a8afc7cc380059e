#include "crowdnav/dstar.hpp"

#include <algorithm>

namespace crowdnav {

DStarPlanner::DStarPlanner(const GridSpec& grid, CellIndex start, CellIndex goal,
                           const std::vector<CellIndex>& blocked)
    : grid_(grid), start_(start), goal_(goal), last_start_(start) {
    grid_.validate();
    if (!grid_.in_bounds(start)) throw ValidationError("planner start out of bounds");
    if (!grid_.in_bounds(goal)) throw ValidationError("planner goal out of bounds");

    const size_t n = grid_.cell_count();
    g_.assign(n, kInf);
    rhs_.assign(n, kInf);
    blocked_.assign(n, 0);
    in_queue_.assign(n, 0);
    queued_key_.assign(n, Key{});

    rhs_[idx(goal_)] = 0.0;
    queue_insert(idx(goal_), calculate_key(idx(goal_)));

    if (!blocked.empty()) set_blocked(blocked);
    if (is_blocked(start_)) throw ValidationError("planner start is blocked");
}

DStarPlanner::Key DStarPlanner::calculate_key(size_t v) const {
    const double m = std::min(g_[v], rhs_[v]);
    return {m + h(start_, cell(v)) + km_, m};
}

void DStarPlanner::queue_remove(size_t v) {
    if (in_queue_[v]) {
        queue_.erase({queued_key_[v], v});
        in_queue_[v] = 0;
    }
}

void DStarPlanner::queue_insert(size_t v, Key k) {
    queue_.insert({k, v});
    queued_key_[v] = k;
    in_queue_[v] = 1;
}

void DStarPlanner::update_vertex(size_t v) {
    if (v != idx(goal_)) {
        double best = kInf;
        const CellIndex c = cell(v);
        for (const auto& d : kNeighborOffsets) {
            const CellIndex s{c.col + d[0], c.row + d[1]};
            if (!grid_.in_bounds(s)) continue;
            const size_t si = idx(s);
            const double cost = edge_cost(si) + g_[si];
            if (cost < best) best = cost;
        }
        rhs_[v] = best;
    }
    queue_remove(v);
    if (g_[v] != rhs_[v]) queue_insert(v, calculate_key(v));
}

void DStarPlanner::set_start(CellIndex s) {
    if (!grid_.in_bounds(s)) throw ValidationError("planner start out of bounds");
    if (s == start_) return;
    km_ += h(last_start_, s);
    last_start_ = s;
    start_ = s;
}

ObstacleDelta DStarPlanner::set_blocked(const std::vector<CellIndex>& blocked) {
    std::vector<uint8_t> next(grid_.cell_count(), 0);
    for (CellIndex c : blocked) {
        if (!grid_.in_bounds(c)) throw ValidationError("blocked cell out of bounds");
        next[idx(c)] = 1;
    }

    ObstacleDelta delta;
    for (size_t i = 0; i < next.size(); ++i) {
        if (next[i] == blocked_[i]) continue;
        if (next[i]) {
            delta.newly_blocked.push_back(cell(i));
        } else {
            delta.newly_freed.push_back(cell(i));
        }
    }
    for (CellIndex c : delta.newly_blocked) blocked_[idx(c)] = 1;
    for (CellIndex c : delta.newly_freed) blocked_[idx(c)] = 0;
    for (CellIndex c : delta.newly_blocked) apply_cell_change(c);
    for (CellIndex c : delta.newly_freed) apply_cell_change(c);
    return delta;
}

void DStarPlanner::apply_cell_change(CellIndex c) {
    // Only edges INTO c changed cost, so every in-neighbor re-derives rhs.
    for (const auto& d : kNeighborOffsets) {
        const CellIndex u{c.col + d[0], c.row + d[1]};
        if (grid_.in_bounds(u)) update_vertex(idx(u));
    }
}

ObstacleDelta DStarPlanner::update_obstacles(const OccupancyForecast& forecast,
                                             const std::vector<CellIndex>& true_current) {
    std::vector<CellIndex> cells = true_current;
    for (const auto& step : forecast.steps) cells.insert(cells.end(), step.begin(), step.end());
    cells.erase(std::remove_if(cells.begin(), cells.end(),
                               [&](CellIndex c) { return c == start_; }),
                cells.end());
    return set_blocked(cells);
}

bool DStarPlanner::compute_shortest_path() {
    const size_t s = idx(start_);
    while (!queue_.empty()) {
        const auto top = *queue_.begin();
        if (!(top.first < calculate_key(s) || g_[s] != rhs_[s])) break;

        const size_t u = top.second;
        const Key k_new = calculate_key(u);
        if (top.first < k_new) {
            queue_.erase(queue_.begin());
            queue_insert(u, k_new);
            continue;
        }
        ++expansions_;
        if (g_[u] > rhs_[u]) {
            g_[u] = rhs_[u];
            queue_remove(u);
            const CellIndex c = cell(u);
            for (const auto& d : kNeighborOffsets) {
                const CellIndex p{c.col + d[0], c.row + d[1]};
                if (grid_.in_bounds(p)) update_vertex(idx(p));
            }
        } else {
            g_[u] = kInf;
            const CellIndex c = cell(u);
            for (const auto& d : kNeighborOffsets) {
                const CellIndex p{c.col + d[0], c.row + d[1]};
                if (grid_.in_bounds(p)) update_vertex(idx(p));
            }
            update_vertex(u);
        }
    }
    return g_[s] != kInf;
}

CellIndex DStarPlanner::next_move() const {
    if (start_ == goal_) return start_;
    double best = kInf;
    CellIndex move = start_;
    for (const auto& d : kNeighborOffsets) {
        const CellIndex v{start_.col + d[0], start_.row + d[1]};
        if (!grid_.in_bounds(v)) continue;
        const size_t vi = idx(v);
        const double cost = edge_cost(vi) + g_[vi];
        if (cost < best) {
            best = cost;
            move = v;
        }
    }
    if (best == kInf) throw NoPathError("no finite-cost path from planner start");
    return move;
}

bool DStarPlanner::audit_queue_matches_inconsistency() const {
    for (size_t v = 0; v < g_.size(); ++v) {
        const bool inconsistent = g_[v] != rhs_[v];
        if (inconsistent != (in_queue_[v] != 0)) return false;
    }
    return queue_.size() == static_cast<size_t>(
                                std::count(in_queue_.begin(), in_queue_.end(), uint8_t{1}));
}

bool DStarPlanner::audit_no_inconsistency_below_start() const {
    const Key start_key = calculate_key(idx(start_));
    for (size_t v = 0; v < g_.size(); ++v) {
        if (g_[v] != rhs_[v] && calculate_key(v) < start_key) return false;
    }
    return true;
}

}  // namespace crowdnav
