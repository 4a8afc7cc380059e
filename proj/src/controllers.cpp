#include "crowdnav/controllers.hpp"

namespace crowdnav {

std::vector<AgentObservation> observe_pedestrians(const SimulationView& view, double radius) {
    std::vector<AgentObservation> obs;
    for (size_t i : view.index->active_at(view.frame)) {
        const RawTrajectory& t = view.store->trajectories()[i];
        AgentObservation a;
        a.pos = t.at_frame(view.frame)->pos;
        const TrajectoryPoint* prev = t.at_frame(view.frame - 1);
        a.vel = prev ? a.pos - prev->pos : Vec2{0.0, 0.0};
        a.radius = radius;
        obs.push_back(a);
    }
    return obs;
}

DStarController::DStarController(std::shared_ptr<const Predictor> predictor)
    : predictor_(std::move(predictor)) {
    if (!predictor_) throw ValidationError("DStarController needs a predictor");
}

std::string DStarController::name() const { return "dstar+" + predictor_->name(); }

void DStarController::begin_episode(const Episode& ep, const TrajectoryStore&,
                                    const GridSpec& grid) {
    planner_.emplace(grid, ep.start, ep.goal);
}

ControllerDecision DStarController::decide(const SimulationView& view) {
    planner_->set_start(view.robot);
    planner_->update_obstacles(predictor_->forecast(view), view.occupied);
    if (!planner_->compute_shortest_path()) {
        return {view.robot, true};
    }
    return {planner_->next_move(), false};
}

PolicyController::PolicyController(PolicyNetwork net) : net_(std::move(net)) {
    state_ = net_.initial_state();
}

void PolicyController::enable_sampling(uint64_t seed) {
    sampling_ = true;
    sample_seed_ = seed;
}

void PolicyController::begin_episode(const Episode& ep, const TrajectoryStore& store,
                                     const GridSpec& grid) {
    state_ = net_.initial_state();
    have_prev_ = false;
    goal_px_ = grid.cell_center(ep.goal);
    trace_.clear();
    if (sampling_) sample_rng_.emplace(derive_seed(sample_seed_, ep.seed));
    (void)store;
}

ControllerDecision PolicyController::decide(const SimulationView& view) {
    const GridSpec& grid = *view.grid;
    AgentObservation robot;
    robot.pos = grid.cell_center(view.robot);
    robot.vel = have_prev_ ? robot.pos - grid.cell_center(prev_cell_) : Vec2{0.0, 0.0};
    robot.radius = kAgentRadiusPx;

    const std::vector<double> enc =
        encode_joint_state(robot, goal_px_, observe_pedestrians(view), view.store->scene());
    const std::vector<uint8_t> mask = legal_action_mask(view.robot, grid);
    const std::vector<double> dist = net_.forward(enc, mask, state_);
    const Action action =
        sample_rng_ && sampling_ ? select_action_sample(dist, *sample_rng_) : select_action_greedy(dist);

    if (record_trace_) {
        PolicyStep step;
        step.input = enc;
        step.mask = mask;
        step.action = static_cast<int>(action);
        trace_.push_back(std::move(step));
    }

    prev_cell_ = view.robot;
    have_prev_ = true;
    return {apply_action(view.robot, action), false};
}

ScriptedController::ScriptedController(std::vector<CellIndex> targets)
    : targets_(std::move(targets)) {}

void ScriptedController::begin_episode(const Episode&, const TrajectoryStore&, const GridSpec&) {
    next_ = 0;
}

ControllerDecision ScriptedController::decide(const SimulationView& view) {
    if (next_ < targets_.size()) return {targets_[next_++], false};
    return {view.robot, false};
}

}  // namespace crowdnav
