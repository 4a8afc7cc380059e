#pragma once

#include <optional>

#include "crowdnav/dstar.hpp"
#include "crowdnav/policy.hpp"
#include "crowdnav/predictors.hpp"
#include "crowdnav/simulator.hpp"

namespace crowdnav {

inline constexpr double kAgentRadiusPx = 15.0;

/// Pixel-level observations (position, one-step velocity) of every pedestrian
/// active at view.frame.
std::vector<AgentObservation> observe_pedestrians(const SimulationView& view,
                                                  double radius = kAgentRadiusPx);

/// Prediction-driven navigation: block true current cells plus the forecast
/// horizon union, replan incrementally, follow the descent; stall when no
/// finite path exists.
class DStarController : public Controller {
public:
    explicit DStarController(std::shared_ptr<const Predictor> predictor);
    std::string name() const override;
    void begin_episode(const Episode& ep, const TrajectoryStore& store,
                       const GridSpec& grid) override;
    ControllerDecision decide(const SimulationView& view) override;

private:
    std::shared_ptr<const Predictor> predictor_;
    std::optional<DStarPlanner> planner_;
};

/// Recurrent policy rollout. Greedy by default; with a sampling seed it draws
/// actions stochastically and records a trace for training.
class PolicyController : public Controller {
public:
    explicit PolicyController(PolicyNetwork net);
    std::string name() const override { return "policy"; }
    void begin_episode(const Episode& ep, const TrajectoryStore& store,
                       const GridSpec& grid) override;
    ControllerDecision decide(const SimulationView& view) override;

    void enable_sampling(uint64_t seed);
    void enable_trace() { record_trace_ = true; }
    const std::vector<PolicyStep>& trace() const { return trace_; }

private:
    PolicyNetwork net_;
    LstmState state_;
    CellIndex prev_cell_{};
    bool have_prev_ = false;
    Vec2 goal_px_{};
    std::optional<Rng> sample_rng_;
    uint64_t sample_seed_ = 0;
    bool sampling_ = false;
    bool record_trace_ = false;
    std::vector<PolicyStep> trace_;
};

/// Replays a fixed move list (repeating the last entry = stay forever once
/// exhausted). Used by simulator tests to construct exact collision scenes.
class ScriptedController : public Controller {
public:
    explicit ScriptedController(std::vector<CellIndex> targets);
    std::string name() const override { return "scripted"; }
    void begin_episode(const Episode& ep, const TrajectoryStore& store,
                       const GridSpec& grid) override;
    ControllerDecision decide(const SimulationView& view) override;

private:
    std::vector<CellIndex> targets_;
    size_t next_ = 0;
};

}  // namespace crowdnav
