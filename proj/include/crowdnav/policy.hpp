#pragma once

#include <iosfwd>

#include "crowdnav/geometry.hpp"

namespace crowdnav {

struct AgentObservation {
    Vec2 pos;
    Vec2 vel;      // pixels per step
    double radius = 15.0;
};

inline constexpr int kActionCount = 9;
inline constexpr int kRobotBlock = 6;
inline constexpr int kPedBlock = 7;
inline constexpr int kVisiblePeds = 3;
inline constexpr int kEncodingDim = kRobotBlock + kVisiblePeds * kPedBlock;

// Action 0 is "stay"; 1..8 follow the neighbor enumeration (N, NE, E, SE, S,
// SW, W, NW), i.e. kNeighborOffsets[a-1].
enum class Action : int {
    Stay = 0,
    N = 1,
    NE = 2,
    E = 3,
    SE = 4,
    S = 5,
    SW = 6,
    W = 7,
    NW = 8,
};

CellIndex apply_action(CellIndex c, Action a);
bool action_in_bounds(CellIndex c, Action a, const GridSpec& grid);
std::vector<uint8_t> legal_action_mask(CellIndex c, const GridSpec& grid);

// Robot block: goal offset (/X, /Y), velocity (/X, /Y), radius (/X),
// goal distance (/diagonal). Then three nearest-pedestrian blocks, each
// robot-relative position, velocity, radius, distance, presence flag; absent
// pedestrians are zero blocks.
std::vector<double> encode_joint_state(const AgentObservation& robot, Vec2 goal,
                                       const std::vector<AgentObservation>& peds,
                                       const SceneSpec& scene);

struct RewardSpec {
    double goal_reward = 1.0;
    double step_penalty = -0.01;
    double collision_penalty = -0.25;
    double discount = 0.99;

    void validate() const;
};

double reward(bool reached_goal, bool collided, const RewardSpec& spec);

struct PolicyConfig {
    int input_dim = kEncodingDim;
    int hidden = 64;
    int fc1 = 64;
    int fc2 = 32;
    int actions = kActionCount;

    void validate() const;
    size_t param_count() const;
};

struct LstmState {
    std::vector<double> h;
    std::vector<double> c;
};

// Parameter layout in `params` (row-major matrices):
//   Wi Ui bi | Wf Uf bf | Wg Ug bg | Wo Uo bo | W1 b1 | W2 b2 | W3 b3
// where W* are hidden×input, U* hidden×hidden, W1 fc1×hidden, W2 fc2×fc1,
// W3 actions×fc2. Gates use sigmoid, cell candidate tanh, dense layers ReLU,
// output a masked stable softmax.
struct PolicyNetwork {
    PolicyConfig config;
    std::vector<double> params;

    static PolicyNetwork init(const PolicyConfig& cfg, uint64_t seed);

    LstmState initial_state() const;

    /// Returns the action distribution (masked, sums to 1) and advances the
    /// recurrent state. `mask` may be empty (all actions legal).
    std::vector<double> forward(const std::vector<double>& input,
                                const std::vector<uint8_t>& mask, LstmState& state) const;
};

Action select_action_greedy(const std::vector<double>& dist);
Action select_action_sample(const std::vector<double>& dist, Rng& rng);

struct PolicyStep {
    std::vector<double> input;
    std::vector<uint8_t> mask;
    int action = 0;
    double advantage = 0.0;
};

struct EpisodeTrace {
    std::vector<PolicyStep> steps;
};

/// Exact gradient of Σ_episodes Σ_t −log π(a_t|s_t)·advantage_t via
/// backpropagation through time. Same length/layout as net.params.
std::vector<double> policy_gradients(const PolicyNetwork& net,
                                     const std::vector<EpisodeTrace>& batch);

struct Checkpoint {
    PolicyNetwork net;
    RewardSpec reward;
    uint64_t episodes = 0;
    uint64_t seed = 0;
};

void save_checkpoint(std::ostream& os, const Checkpoint& ck);
void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(std::istream& is);
Checkpoint load_checkpoint(const std::string& path);

/// Cell per position; the moved flag is false exactly when the cell repeats
/// the previous one. The first entry is always flagged moved.
std::vector<std::pair<CellIndex, bool>> rasterize_continuous_path(const std::vector<Vec2>& positions,
                                                                  const GridSpec& grid);

}  // namespace crowdnav
