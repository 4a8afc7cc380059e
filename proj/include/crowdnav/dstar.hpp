#pragma once

#include <limits>
#include <set>
#include <utility>

#include "crowdnav/forecast.hpp"
#include "crowdnav/geometry.hpp"

namespace crowdnav {

struct ObstacleDelta {
    std::vector<CellIndex> newly_blocked;
    std::vector<CellIndex> newly_freed;
};

// Incremental D* Lite on the 8-connected unit-cost grid. Blocking is modeled
// as infinite-cost edges into blocked cells; unknown cells are free. The
// search runs backward from the goal, so g(u) estimates cost-to-goal and the
// robot descends g greedily.
class DStarPlanner {
public:
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    DStarPlanner(const GridSpec& grid, CellIndex start, CellIndex goal,
                 const std::vector<CellIndex>& blocked = {});

    /// Robot moved: shifts the search root and advances the key modifier.
    void set_start(CellIndex s);

    /// Rebuild the blocked set as true current cells ∪ forecast horizon union,
    /// excluding the robot's own cell, and repair affected edges.
    ObstacleDelta update_obstacles(const OccupancyForecast& forecast,
                                   const std::vector<CellIndex>& true_current);

    /// Direct form used by tests and static benchmarks.
    ObstacleDelta set_blocked(const std::vector<CellIndex>& blocked);

    /// Repair the solution; true iff a finite-cost start→goal path exists.
    bool compute_shortest_path();

    /// Neighbor minimizing move cost + g, ties by N,NE,E,SE,S,SW,W,NW order.
    /// Requires a prior compute_shortest_path() == true.
    CellIndex next_move() const;

    /// Start→goal cost after compute_shortest_path (kInf when disconnected).
    double path_cost() const { return g_[idx(start_)]; }

    CellIndex start() const { return start_; }
    CellIndex goal() const { return goal_; }
    const GridSpec& grid() const { return grid_; }
    bool is_blocked(CellIndex c) const { return blocked_[idx(c)] != 0; }

    uint64_t expansions() const { return expansions_; }
    size_t queue_size() const { return queue_.size(); }

    // Test hooks: the queue holds exactly the locally inconsistent vertices,
    // and after a successful compute no inconsistent vertex sorts below the
    // start key.
    bool audit_queue_matches_inconsistency() const;
    bool audit_no_inconsistency_below_start() const;

private:
    using Key = std::pair<double, double>;

    size_t idx(CellIndex c) const { return static_cast<size_t>(grid_.index_of(c)); }
    CellIndex cell(size_t i) const { return grid_.cell_at(static_cast<int>(i)); }
    double h(CellIndex a, CellIndex b) const { return static_cast<double>(chebyshev(a, b)); }
    double edge_cost(size_t into) const { return blocked_[into] ? kInf : 1.0; }

    Key calculate_key(size_t v) const;
    void queue_remove(size_t v);
    void queue_insert(size_t v, Key k);
    void update_vertex(size_t v);
    void apply_cell_change(CellIndex c);

    GridSpec grid_;
    CellIndex start_;
    CellIndex goal_;
    CellIndex last_start_;
    double km_ = 0.0;
    std::vector<double> g_;
    std::vector<double> rhs_;
    std::vector<uint8_t> blocked_;
    std::vector<uint8_t> in_queue_;
    std::vector<Key> queued_key_;
    std::set<std::pair<Key, size_t>> queue_;
    uint64_t expansions_ = 0;
};

}  // namespace crowdnav
