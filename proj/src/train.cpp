#include "crowdnav/train.hpp"

#include <cmath>
#include <ostream>

namespace crowdnav {

void adam_step(std::vector<double>& params, const std::vector<double>& grad, AdamState& state,
               double lr, double beta1, double beta2, double eps) {
    if (params.size() != grad.size()) throw ValidationError("adam: gradient size mismatch");
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    if (state.m.size() != params.size()) throw ValidationError("adam: state size mismatch");
    state.t += 1;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
    for (size_t i = 0; i < params.size(); ++i) {
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grad[i];
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grad[i] * grad[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

void TrainConfig::validate() const {
    net.validate();
    reward.validate();
    if (episodes < 0) throw ValidationError("episode count must be >= 0");
    if (batch_episodes < 1) throw ValidationError("batch size must be >= 1");
    if (learning_rate <= 0.0) throw ValidationError("learning rate must be > 0");
    if (baseline_beta < 0.0 || baseline_beta >= 1.0) {
        throw ValidationError("baseline EMA weight must be in [0, 1)");
    }
    if (checkpoint_every < 1) throw ValidationError("checkpoint interval must be >= 1");
}

TrainResult train_policy(const TrajectoryStore& store, const GridSpec& grid,
                         const TrainConfig& cfg, uint64_t seed,
                         const std::string& checkpoint_dir) {
    cfg.validate();

    TrainResult result;
    result.checkpoint.net = PolicyNetwork::init(cfg.net, seed);
    result.checkpoint.reward = cfg.reward;
    result.checkpoint.seed = seed;

    if (cfg.episodes == 0) return result;

    const std::vector<Episode> episodes =
        make_episodes(store, grid, cfg.episodes, derive_seed(seed, 0x7E01), cfg.sampling);
    const FrameIndex index(store);

    AdamState adam;
    double baseline = 0.0;
    bool baseline_ready = false;
    std::vector<EpisodeTrace> batch;

    for (size_t e = 0; e < episodes.size(); ++e) {
        PolicyController controller(result.checkpoint.net);
        controller.enable_sampling(derive_seed(seed, 0xA0000 + e));
        controller.enable_trace();
        const EpisodeResult r = run_episode(controller, episodes[e], store, index, grid);

        // Per-step rewards from the outcome record; there is one trace entry
        // per executed tick.
        const auto& steps = controller.trace();
        std::vector<double> rewards(steps.size(), 0.0);
        for (size_t k = 0; k < steps.size(); ++k) {
            const int64_t tick = static_cast<int64_t>(k) + 1;
            const bool reached = r.reached_goal && tick == r.steps_taken;
            bool collided = false;
            for (const CollisionEvent& ev : r.events) {
                if (ev.tick == tick) {
                    collided = true;
                    break;
                }
            }
            rewards[k] = reward(reached, collided, cfg.reward);
        }

        std::vector<double> returns(steps.size(), 0.0);
        double g = 0.0;
        for (size_t k = steps.size(); k-- > 0;) {
            g = rewards[k] + cfg.reward.discount * g;
            returns[k] = g;
        }
        const double episode_return = steps.empty() ? 0.0 : returns.front();

        if (!steps.empty()) {
            const double b = baseline_ready ? baseline : 0.0;
            EpisodeTrace trace;
            trace.steps = steps;
            for (size_t k = 0; k < steps.size(); ++k) trace.steps[k].advantage = returns[k] - b;
            batch.push_back(std::move(trace));

            baseline = baseline_ready
                           ? cfg.baseline_beta * baseline + (1.0 - cfg.baseline_beta) * episode_return
                           : episode_return;
            baseline_ready = true;
        }

        TrainEpisodeLog log;
        log.episode = static_cast<int64_t>(e);
        log.episode_return = episode_return;
        log.steps = r.steps_taken;
        log.reached_goal = r.reached_goal;
        log.sr = r.sr;
        log.sp = r.sp;
        log.mrp = r.mrp;
        result.log.push_back(log);
        result.checkpoint.episodes = static_cast<uint64_t>(e) + 1;

        const bool last = e + 1 == episodes.size();
        if (static_cast<int64_t>(batch.size()) >= cfg.batch_episodes || (last && !batch.empty())) {
            std::vector<double> grad = policy_gradients(result.checkpoint.net, batch);
            const double scale = 1.0 / static_cast<double>(batch.size());
            for (double& v : grad) v *= scale;
            adam_step(result.checkpoint.net.params, grad, adam, cfg.learning_rate);
            batch.clear();
        }

        if (!checkpoint_dir.empty() &&
            (static_cast<int64_t>(e + 1) % cfg.checkpoint_every == 0 || last)) {
            save_checkpoint(checkpoint_dir + "/checkpoint_" + std::to_string(e + 1) + ".bin",
                            result.checkpoint);
        }
    }
    return result;
}

void save_training_log(std::ostream& os, const std::vector<TrainEpisodeLog>& log) {
    os << "episode,return,steps,reached_goal,SR,SP,MRP\n";
    for (const TrainEpisodeLog& row : log) {
        os << row.episode << ',' << format_double(row.episode_return) << ',' << row.steps << ','
           << (row.reached_goal ? 1 : 0) << ',' << row.sr << ',' << row.sp << ',' << row.mrp
           << '\n';
    }
}

}  // namespace crowdnav
