#include "crowdnav/features.hpp"

#include <cmath>

namespace crowdnav {

namespace {

double step_angle(Vec2 d) {
    if (d.x == 0.0 && d.y == 0.0) return 0.0;
    double a = std::atan2(d.y, d.x);
    if (a <= -M_PI) a += 2.0 * M_PI;  // fold atan2's -pi onto +pi
    return a;
}

}  // namespace

FeatureVector extract_features(const std::array<Vec2, kHistoryLen>& last5) {
    FeatureVector f{};
    int k = 0;
    for (const Vec2& p : last5) {
        f[k++] = p.x;
        f[k++] = p.y;
    }

    std::array<Vec2, kHistoryLen - 1> steps;
    for (int i = 0; i < kHistoryLen - 1; ++i) {
        steps[i] = last5[i + 1] - last5[i];
        f[k++] = steps[i].x;
        f[k++] = steps[i].y;
    }

    std::array<double, kHistoryLen - 1> speeds;
    double speed_sum = 0.0;
    for (int i = 0; i < kHistoryLen - 1; ++i) {
        speeds[i] = norm(steps[i]);
        speed_sum += speeds[i];
        f[k++] = speeds[i];
    }
    f[k++] = speed_sum / (kHistoryLen - 1);

    double accel_sum = 0.0;
    for (int i = 0; i < kHistoryLen - 2; ++i) {
        const double a = speeds[i + 1] - speeds[i];
        accel_sum += a;
        f[k++] = a;
    }
    f[k++] = accel_sum / (kHistoryLen - 2);

    for (int i = 0; i < kHistoryLen - 1; ++i) f[k++] = step_angle(steps[i]);
    return f;
}

std::optional<std::array<Vec2, kHistoryLen>> history_at(const RawTrajectory& traj, int64_t frame) {
    const int64_t idx = frame - traj.first_frame();
    if (idx < kHistoryLen - 1 || idx >= static_cast<int64_t>(traj.length())) return std::nullopt;
    std::array<Vec2, kHistoryLen> h;
    for (int i = 0; i < kHistoryLen; ++i) {
        h[i] = traj.points[static_cast<size_t>(idx - (kHistoryLen - 1) + i)].pos;
    }
    return h;
}

std::vector<TrainingWindow> build_training_windows(const RawTrajectory& traj) {
    std::vector<TrainingWindow> out;
    const int64_t n = static_cast<int64_t>(traj.length());
    for (int64_t start = 0; start + kHistoryLen + kHorizon <= n; ++start) {
        TrainingWindow w;
        w.pedestrian_id = traj.pedestrian_id;
        const size_t anchor = static_cast<size_t>(start + kHistoryLen - 1);
        w.frame = traj.points[anchor].frame;

        std::array<Vec2, kHistoryLen> h;
        for (int i = 0; i < kHistoryLen; ++i) h[i] = traj.points[static_cast<size_t>(start) + i].pos;
        w.features = extract_features(h);

        const Vec2 origin = traj.points[anchor].pos;
        for (int t = 0; t < kHorizon; ++t) {
            const Vec2 d = traj.points[anchor + 1 + static_cast<size_t>(t)].pos - origin;
            w.targets[2 * t] = d.x;
            w.targets[2 * t + 1] = d.y;
        }
        out.push_back(w);
    }
    return out;
}

std::vector<TrainingWindow> build_training_windows(const TrajectoryStore& store) {
    std::vector<TrainingWindow> out;
    for (const RawTrajectory& t : store.trajectories()) {
        auto w = build_training_windows(t);
        out.insert(out.end(), w.begin(), w.end());
    }
    return out;
}

SplitIndices split_by_trajectory(size_t count, uint64_t seed, double train_frac, double val_frac) {
    if (train_frac < 0.0 || val_frac < 0.0 || train_frac + val_frac > 1.0) {
        throw ValidationError("split fractions must be nonnegative and sum to <= 1");
    }
    std::vector<size_t> order(count);
    for (size_t i = 0; i < count; ++i) order[i] = i;
    Rng rng(derive_seed(seed, 0x5917));
    rng.shuffle(order);

    const size_t n_train = std::min(count, static_cast<size_t>(std::llround(train_frac * count)));
    const size_t n_val =
        std::min(count - n_train, static_cast<size_t>(std::llround(val_frac * count)));

    SplitIndices s;
    s.train.assign(order.begin(), order.begin() + static_cast<ptrdiff_t>(n_train));
    s.val.assign(order.begin() + static_cast<ptrdiff_t>(n_train),
                 order.begin() + static_cast<ptrdiff_t>(n_train + n_val));
    s.test.assign(order.begin() + static_cast<ptrdiff_t>(n_train + n_val), order.end());
    return s;
}

}  // namespace crowdnav
