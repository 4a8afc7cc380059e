#include "crowdnav/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace crowdnav {

CellIndex apply_action(CellIndex c, Action a) {
    const int k = static_cast<int>(a);
    if (k == 0) return c;
    const auto& d = kNeighborOffsets[static_cast<size_t>(k - 1)];
    return {c.col + d[0], c.row + d[1]};
}

bool action_in_bounds(CellIndex c, Action a, const GridSpec& grid) {
    return grid.in_bounds(apply_action(c, a));
}

std::vector<uint8_t> legal_action_mask(CellIndex c, const GridSpec& grid) {
    std::vector<uint8_t> mask(kActionCount, 0);
    for (int a = 0; a < kActionCount; ++a) {
        mask[static_cast<size_t>(a)] = action_in_bounds(c, static_cast<Action>(a), grid) ? 1 : 0;
    }
    return mask;
}

std::vector<double> encode_joint_state(const AgentObservation& robot, Vec2 goal,
                                       const std::vector<AgentObservation>& peds,
                                       const SceneSpec& scene) {
    scene.validate();
    const double X = scene.width;
    const double Y = scene.height;
    const double diag = scene.diagonal();

    std::vector<double> enc(kEncodingDim, 0.0);
    enc[0] = (goal.x - robot.pos.x) / X;
    enc[1] = (goal.y - robot.pos.y) / Y;
    enc[2] = robot.vel.x / X;
    enc[3] = robot.vel.y / Y;
    enc[4] = robot.radius / X;
    enc[5] = norm(goal - robot.pos) / diag;

    std::vector<size_t> order(peds.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return norm(peds[a].pos - robot.pos) < norm(peds[b].pos - robot.pos);
    });

    for (size_t k = 0; k < static_cast<size_t>(kVisiblePeds) && k < order.size(); ++k) {
        const AgentObservation& p = peds[order[k]];
        double* block = enc.data() + kRobotBlock + k * kPedBlock;
        block[0] = (p.pos.x - robot.pos.x) / X;
        block[1] = (p.pos.y - robot.pos.y) / Y;
        block[2] = p.vel.x / X;
        block[3] = p.vel.y / Y;
        block[4] = p.radius / X;
        block[5] = norm(p.pos - robot.pos) / diag;
        block[6] = 1.0;
    }
    return enc;
}

void RewardSpec::validate() const {
    if (goal_reward <= 0.0) throw ValidationError("goal reward must be positive");
    if (step_penalty > 0.0 || collision_penalty > 0.0) {
        throw ValidationError("penalties must be <= 0");
    }
    if (discount <= 0.0 || discount > 1.0) throw ValidationError("discount must be in (0, 1]");
}

double reward(bool reached_goal, bool collided, const RewardSpec& spec) {
    if (reached_goal) return spec.goal_reward;
    if (collided) return spec.collision_penalty + spec.step_penalty;
    return spec.step_penalty;
}

void PolicyConfig::validate() const {
    if (input_dim < 1 || hidden < 1 || fc1 < 1 || fc2 < 1 || actions < 2) {
        throw ValidationError("bad policy network dimensions");
    }
}

namespace {

struct Offsets {
    size_t Wi, Ui, bi, Wf, Uf, bf, Wg, Ug, bg, Wo, Uo, bo;
    size_t W1, b1, W2, b2, W3, b3;
    size_t total;
};

Offsets layout(const PolicyConfig& c) {
    const size_t H = static_cast<size_t>(c.hidden);
    const size_t I = static_cast<size_t>(c.input_dim);
    const size_t F1 = static_cast<size_t>(c.fc1);
    const size_t F2 = static_cast<size_t>(c.fc2);
    const size_t A = static_cast<size_t>(c.actions);
    Offsets o{};
    size_t p = 0;
    auto gate = [&](size_t& W, size_t& U, size_t& b) {
        W = p;
        p += H * I;
        U = p;
        p += H * H;
        b = p;
        p += H;
    };
    gate(o.Wi, o.Ui, o.bi);
    gate(o.Wf, o.Uf, o.bf);
    gate(o.Wg, o.Ug, o.bg);
    gate(o.Wo, o.Uo, o.bo);
    o.W1 = p;
    p += F1 * H;
    o.b1 = p;
    p += F1;
    o.W2 = p;
    p += F2 * F1;
    o.b2 = p;
    p += F2;
    o.W3 = p;
    p += A * F2;
    o.b3 = p;
    p += A;
    o.total = p;
    return o;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y += W x, W is rows x cols row-major.
void matvec_add(const double* W, size_t rows, size_t cols, const double* x, double* y) {
    for (size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        const double* row = W + r * cols;
        for (size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
        y[r] += acc;
    }
}

// y += W^T d (y has cols entries).
void mat_t_vec_add(const double* W, size_t rows, size_t cols, const double* d, double* y) {
    for (size_t r = 0; r < rows; ++r) {
        const double* row = W + r * cols;
        const double dr = d[r];
        for (size_t c = 0; c < cols; ++c) y[c] += row[c] * dr;
    }
}

// W += d ⊗ x.
void outer_add(double* W, size_t rows, size_t cols, const double* d, const double* x) {
    for (size_t r = 0; r < rows; ++r) {
        double* row = W + r * cols;
        const double dr = d[r];
        for (size_t c = 0; c < cols; ++c) row[c] += dr * x[c];
    }
}

void add_vec(double* y, const double* x, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] += x[i];
}

struct StepCache {
    std::vector<double> x, h_prev, c_prev;
    std::vector<double> i, f, g, o, c, tc, h;
    std::vector<double> z1, a1, z2, a2, probs;
};

std::vector<double> masked_softmax(const std::vector<double>& logits,
                                   const std::vector<uint8_t>& mask) {
    const size_t n = logits.size();
    if (!mask.empty() && mask.size() != n) throw ValidationError("action mask size mismatch");
    auto legal = [&](size_t a) { return mask.empty() || mask[a] != 0; };

    double m = -std::numeric_limits<double>::infinity();
    for (size_t a = 0; a < n; ++a) {
        if (legal(a)) m = std::max(m, logits[a]);
    }
    if (!std::isfinite(m)) throw ValidationError("no legal action to normalize over");

    std::vector<double> p(n, 0.0);
    double sum = 0.0;
    for (size_t a = 0; a < n; ++a) {
        if (legal(a)) {
            p[a] = std::exp(logits[a] - m);
            sum += p[a];
        }
    }
    for (double& v : p) v /= sum;
    return p;
}

// Shared by forward() and the BPTT recompute.
StepCache run_step(const PolicyNetwork& net, const Offsets& off, const std::vector<double>& input,
                   const std::vector<uint8_t>& mask, const LstmState& state) {
    const PolicyConfig& cfg = net.config;
    if (input.size() != static_cast<size_t>(cfg.input_dim)) {
        throw ValidationError("policy input size mismatch");
    }
    if (state.h.size() != static_cast<size_t>(cfg.hidden) ||
        state.c.size() != static_cast<size_t>(cfg.hidden)) {
        throw ValidationError("policy hidden state size mismatch");
    }
    const size_t H = static_cast<size_t>(cfg.hidden);
    const size_t I = static_cast<size_t>(cfg.input_dim);
    const size_t F1 = static_cast<size_t>(cfg.fc1);
    const size_t F2 = static_cast<size_t>(cfg.fc2);
    const size_t A = static_cast<size_t>(cfg.actions);
    const double* P = net.params.data();

    StepCache s;
    s.x = input;
    s.h_prev = state.h;
    s.c_prev = state.c;

    auto gate_pre = [&](size_t W, size_t U, size_t b) {
        std::vector<double> z(P + b, P + b + H);
        matvec_add(P + W, H, I, s.x.data(), z.data());
        matvec_add(P + U, H, H, s.h_prev.data(), z.data());
        return z;
    };
    s.i = gate_pre(off.Wi, off.Ui, off.bi);
    s.f = gate_pre(off.Wf, off.Uf, off.bf);
    s.g = gate_pre(off.Wg, off.Ug, off.bg);
    s.o = gate_pre(off.Wo, off.Uo, off.bo);
    for (size_t k = 0; k < H; ++k) {
        s.i[k] = sigmoid(s.i[k]);
        s.f[k] = sigmoid(s.f[k]);
        s.g[k] = std::tanh(s.g[k]);
        s.o[k] = sigmoid(s.o[k]);
    }
    s.c.resize(H);
    s.tc.resize(H);
    s.h.resize(H);
    for (size_t k = 0; k < H; ++k) {
        s.c[k] = s.f[k] * s.c_prev[k] + s.i[k] * s.g[k];
        s.tc[k] = std::tanh(s.c[k]);
        s.h[k] = s.o[k] * s.tc[k];
    }

    s.z1.assign(P + off.b1, P + off.b1 + F1);
    matvec_add(P + off.W1, F1, H, s.h.data(), s.z1.data());
    s.a1.resize(F1);
    for (size_t k = 0; k < F1; ++k) s.a1[k] = std::max(0.0, s.z1[k]);

    s.z2.assign(P + off.b2, P + off.b2 + F2);
    matvec_add(P + off.W2, F2, F1, s.a1.data(), s.z2.data());
    s.a2.resize(F2);
    for (size_t k = 0; k < F2; ++k) s.a2[k] = std::max(0.0, s.z2[k]);

    std::vector<double> logits(P + off.b3, P + off.b3 + A);
    matvec_add(P + off.W3, A, F2, s.a2.data(), logits.data());
    s.probs = masked_softmax(logits, mask);
    return s;
}

}  // namespace

size_t PolicyConfig::param_count() const { return layout(*this).total; }

PolicyNetwork PolicyNetwork::init(const PolicyConfig& cfg, uint64_t seed) {
    cfg.validate();
    const Offsets off = layout(cfg);
    PolicyNetwork net;
    net.config = cfg;
    net.params.resize(off.total);
    Rng rng(derive_seed(seed, 0x9017));
    for (double& p : net.params) p = rng.uniform(-0.08, 0.08);
    for (size_t k = 0; k < static_cast<size_t>(cfg.hidden); ++k) net.params[off.bf + k] = 1.0;
    return net;
}

LstmState PolicyNetwork::initial_state() const {
    return {std::vector<double>(static_cast<size_t>(config.hidden), 0.0),
            std::vector<double>(static_cast<size_t>(config.hidden), 0.0)};
}

std::vector<double> PolicyNetwork::forward(const std::vector<double>& input,
                                           const std::vector<uint8_t>& mask,
                                           LstmState& state) const {
    const Offsets off = layout(config);
    StepCache s = run_step(*this, off, input, mask, state);
    state.h = s.h;
    state.c = s.c;
    return s.probs;
}

Action select_action_greedy(const std::vector<double>& dist) {
    size_t best = 0;
    for (size_t a = 1; a < dist.size(); ++a) {
        if (dist[a] > dist[best]) best = a;
    }
    return static_cast<Action>(best);
}

Action select_action_sample(const std::vector<double>& dist, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    size_t last_positive = 0;
    for (size_t a = 0; a < dist.size(); ++a) {
        if (dist[a] <= 0.0) continue;
        last_positive = a;
        acc += dist[a];
        if (u < acc) return static_cast<Action>(a);
    }
    return static_cast<Action>(last_positive);
}

std::vector<double> policy_gradients(const PolicyNetwork& net,
                                     const std::vector<EpisodeTrace>& batch) {
    if (batch.empty()) throw ValidationError("policy_gradients: empty batch");
    const PolicyConfig& cfg = net.config;
    const Offsets off = layout(cfg);
    const size_t H = static_cast<size_t>(cfg.hidden);
    const size_t I = static_cast<size_t>(cfg.input_dim);
    const size_t F1 = static_cast<size_t>(cfg.fc1);
    const size_t F2 = static_cast<size_t>(cfg.fc2);
    const size_t A = static_cast<size_t>(cfg.actions);
    const double* P = net.params.data();

    std::vector<double> grad(off.total, 0.0);
    double* G = grad.data();

    for (const EpisodeTrace& ep : batch) {
        std::vector<StepCache> caches;
        caches.reserve(ep.steps.size());
        LstmState state = net.initial_state();
        for (const PolicyStep& step : ep.steps) {
            caches.push_back(run_step(net, off, step.input, step.mask, state));
            state.h = caches.back().h;
            state.c = caches.back().c;
        }

        std::vector<double> dh_next(H, 0.0);
        std::vector<double> dc_next(H, 0.0);
        for (size_t t = caches.size(); t-- > 0;) {
            const StepCache& s = caches[t];
            const PolicyStep& step = ep.steps[t];
            if (step.action < 0 || step.action >= cfg.actions) {
                throw ValidationError("trace action out of range");
            }

            // d(-log p[a] * adv)/dlogits for the masked softmax.
            std::vector<double> dlogits(A, 0.0);
            for (size_t a = 0; a < A; ++a) {
                if (step.mask.empty() || step.mask[a] != 0) {
                    dlogits[a] = step.advantage * s.probs[a];
                }
            }
            dlogits[static_cast<size_t>(step.action)] -= step.advantage;

            outer_add(G + off.W3, A, F2, dlogits.data(), s.a2.data());
            add_vec(G + off.b3, dlogits.data(), A);
            std::vector<double> da2(F2, 0.0);
            mat_t_vec_add(P + off.W3, A, F2, dlogits.data(), da2.data());

            std::vector<double> dz2(F2, 0.0);
            for (size_t k = 0; k < F2; ++k) dz2[k] = s.z2[k] > 0.0 ? da2[k] : 0.0;
            outer_add(G + off.W2, F2, F1, dz2.data(), s.a1.data());
            add_vec(G + off.b2, dz2.data(), F2);
            std::vector<double> da1(F1, 0.0);
            mat_t_vec_add(P + off.W2, F2, F1, dz2.data(), da1.data());

            std::vector<double> dz1(F1, 0.0);
            for (size_t k = 0; k < F1; ++k) dz1[k] = s.z1[k] > 0.0 ? da1[k] : 0.0;
            outer_add(G + off.W1, F1, H, dz1.data(), s.h.data());
            add_vec(G + off.b1, dz1.data(), F1);

            std::vector<double> dh(dh_next);
            mat_t_vec_add(P + off.W1, F1, H, dz1.data(), dh.data());

            std::vector<double> dzi(H), dzf(H), dzg(H), dzo(H), dc(H);
            for (size_t k = 0; k < H; ++k) {
                const double dok = dh[k] * s.tc[k];
                dzo[k] = dok * s.o[k] * (1.0 - s.o[k]);
                dc[k] = dc_next[k] + dh[k] * s.o[k] * (1.0 - s.tc[k] * s.tc[k]);
                const double dik = dc[k] * s.g[k];
                dzi[k] = dik * s.i[k] * (1.0 - s.i[k]);
                const double dfk = dc[k] * s.c_prev[k];
                dzf[k] = dfk * s.f[k] * (1.0 - s.f[k]);
                const double dgk = dc[k] * s.i[k];
                dzg[k] = dgk * (1.0 - s.g[k] * s.g[k]);
                dc_next[k] = dc[k] * s.f[k];
            }

            outer_add(G + off.Wi, H, I, dzi.data(), s.x.data());
            outer_add(G + off.Wf, H, I, dzf.data(), s.x.data());
            outer_add(G + off.Wg, H, I, dzg.data(), s.x.data());
            outer_add(G + off.Wo, H, I, dzo.data(), s.x.data());
            outer_add(G + off.Ui, H, H, dzi.data(), s.h_prev.data());
            outer_add(G + off.Uf, H, H, dzf.data(), s.h_prev.data());
            outer_add(G + off.Ug, H, H, dzg.data(), s.h_prev.data());
            outer_add(G + off.Uo, H, H, dzo.data(), s.h_prev.data());
            add_vec(G + off.bi, dzi.data(), H);
            add_vec(G + off.bf, dzf.data(), H);
            add_vec(G + off.bg, dzg.data(), H);
            add_vec(G + off.bo, dzo.data(), H);

            std::fill(dh_next.begin(), dh_next.end(), 0.0);
            mat_t_vec_add(P + off.Ui, H, H, dzi.data(), dh_next.data());
            mat_t_vec_add(P + off.Uf, H, H, dzf.data(), dh_next.data());
            mat_t_vec_add(P + off.Ug, H, H, dzg.data(), dh_next.data());
            mat_t_vec_add(P + off.Uo, H, H, dzo.data(), dh_next.data());
        }
    }
    return grad;
}

// ---------------------------------------------------------------------------
// Checkpoint: "CNPK" magic, version, layer sizes, reward spec, training
// metadata, raw parameter doubles. Bit-exact by construction.
// ---------------------------------------------------------------------------

namespace {
constexpr char kCheckpointMagic[4] = {'C', 'N', 'P', 'K'};
constexpr uint32_t kCheckpointVersion = 1;
}  // namespace

void save_checkpoint(std::ostream& os, const Checkpoint& ck) {
    os.write(kCheckpointMagic, 4);
    write_u32(os, kCheckpointVersion);
    write_u32(os, static_cast<uint32_t>(ck.net.config.input_dim));
    write_u32(os, static_cast<uint32_t>(ck.net.config.hidden));
    write_u32(os, static_cast<uint32_t>(ck.net.config.fc1));
    write_u32(os, static_cast<uint32_t>(ck.net.config.fc2));
    write_u32(os, static_cast<uint32_t>(ck.net.config.actions));
    write_f64(os, ck.reward.goal_reward);
    write_f64(os, ck.reward.step_penalty);
    write_f64(os, ck.reward.collision_penalty);
    write_f64(os, ck.reward.discount);
    write_u64(os, ck.episodes);
    write_u64(os, ck.seed);
    write_u64(os, ck.net.params.size());
    for (double p : ck.net.params) write_f64(os, p);
    if (!os) throw ValidationError("checkpoint write failed");
}

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot open checkpoint for writing: " + path);
    save_checkpoint(os, ck);
}

Checkpoint load_checkpoint(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
        throw ParseError("not a checkpoint file (bad magic)");
    }
    const uint32_t version = read_u32(is);
    if (version != kCheckpointVersion) {
        throw ParseError("unsupported checkpoint version " + std::to_string(version));
    }
    Checkpoint ck;
    ck.net.config.input_dim = static_cast<int>(read_u32(is));
    ck.net.config.hidden = static_cast<int>(read_u32(is));
    ck.net.config.fc1 = static_cast<int>(read_u32(is));
    ck.net.config.fc2 = static_cast<int>(read_u32(is));
    ck.net.config.actions = static_cast<int>(read_u32(is));
    ck.net.config.validate();
    ck.reward.goal_reward = read_f64(is);
    ck.reward.step_penalty = read_f64(is);
    ck.reward.collision_penalty = read_f64(is);
    ck.reward.discount = read_f64(is);
    ck.reward.validate();
    ck.episodes = read_u64(is);
    ck.seed = read_u64(is);
    const uint64_t count = read_u64(is);
    if (count != ck.net.config.param_count()) {
        throw ParseError("checkpoint parameter count does not match layer sizes");
    }
    ck.net.params.resize(count);
    for (double& p : ck.net.params) p = read_f64(is);
    if (!is) throw ParseError("truncated checkpoint file");
    return ck;
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot open checkpoint: " + path);
    return load_checkpoint(is);
}

std::vector<std::pair<CellIndex, bool>> rasterize_continuous_path(const std::vector<Vec2>& positions,
                                                                  const GridSpec& grid) {
    std::vector<std::pair<CellIndex, bool>> out;
    out.reserve(positions.size());
    for (const Vec2& p : positions) {
        const CellIndex c = to_grid(p, grid);
        const bool moved = out.empty() || c != out.back().first;
        out.emplace_back(c, moved);
    }
    return out;
}

}  // namespace crowdnav
