#pragma once

#include <iosfwd>

#include "crowdnav/controllers.hpp"

namespace crowdnav {

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    int64_t t = 0;
};

void adam_step(std::vector<double>& params, const std::vector<double>& grad, AdamState& state,
               double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

struct TrainConfig {
    PolicyConfig net;
    RewardSpec reward;
    int64_t episodes = 1000;
    int64_t batch_episodes = 10;
    double learning_rate = 0.003;
    double baseline_beta = 0.9;  // EMA weight on the moving-average return baseline
    int64_t checkpoint_every = 250;
    EpisodeSampling sampling;

    void validate() const;
};

struct TrainEpisodeLog {
    int64_t episode = 0;
    double episode_return = 0.0;  // discounted
    int64_t steps = 0;
    bool reached_goal = false;
    int64_t sr = 0;
    int64_t sp = 0;
    int64_t mrp = 0;
};

struct TrainResult {
    Checkpoint checkpoint;
    std::vector<TrainEpisodeLog> log;
};

/// REINFORCE with a moving-average baseline over a seeded episode stream.
/// Single-threaded and fully deterministic given (store, config, seed).
/// When checkpoint_dir is nonempty, intermediate checkpoints are written
/// every checkpoint_every episodes.
TrainResult train_policy(const TrajectoryStore& store, const GridSpec& grid,
                         const TrainConfig& cfg, uint64_t seed,
                         const std::string& checkpoint_dir = "");

void save_training_log(std::ostream& os, const std::vector<TrainEpisodeLog>& log);

}  // namespace crowdnav
