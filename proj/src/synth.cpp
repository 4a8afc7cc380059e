#include "crowdnav/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace crowdnav {

void SynthConfig::validate() const {
    scene.validate();
    if (pedestrians < 0) throw ValidationError("pedestrians must be >= 0");
    if (frames <= 0) throw ValidationError("frames must be > 0");
    if (straight_fraction < 0.0 || straight_fraction > 1.0 || loiter_fraction < 0.0 ||
        loiter_fraction > 1.0 || straight_fraction + loiter_fraction > 1.0 + 1e-12) {
        throw ValidationError("motion-mix fractions must lie in [0,1] and sum to <= 1");
    }
    if (speed_px_mean <= 0.0 || speed_px_std < 0.0) {
        throw ValidationError("speed_px_mean must be > 0 and speed_px_std >= 0");
    }
}

SynthConfig parse_synth_config(std::istream& in) {
    SynthConfig cfg;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const size_t eq = stripped.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("line " + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key(trim(stripped.substr(0, eq)));
        const std::string_view value = trim(stripped.substr(eq + 1));
        int64_t i = 0;
        double d = 0.0;
        auto want_int = [&](int64_t& out) {
            if (!parse_i64(value, i)) {
                throw ParseError("line " + std::to_string(line_no) + ": bad integer for " + key);
            }
            out = i;
        };
        auto want_real = [&](double& out) {
            if (!parse_f64(value, d)) {
                throw ParseError("line " + std::to_string(line_no) + ": bad number for " + key);
            }
            out = d;
        };
        if (key == "pedestrians") {
            int64_t v;
            want_int(v);
            cfg.pedestrians = static_cast<int>(v);
        } else if (key == "frames") {
            want_int(cfg.frames);
        } else if (key == "seed") {
            int64_t v;
            want_int(v);
            cfg.seed = static_cast<uint64_t>(v);
        } else if (key == "straight_fraction") {
            want_real(cfg.straight_fraction);
        } else if (key == "loiter_fraction") {
            want_real(cfg.loiter_fraction);
        } else if (key == "speed_px_mean") {
            want_real(cfg.speed_px_mean);
        } else if (key == "speed_px_std") {
            want_real(cfg.speed_px_std);
        } else if (key == "scene_x") {
            want_real(cfg.scene.width);
        } else if (key == "scene_y") {
            want_real(cfg.scene.height);
        } else {
            throw ParseError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

SynthConfig load_synth_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open generator config: " + path);
    return parse_synth_config(in);
}

RawTrajectory make_straight_walker(int64_t id, Vec2 start, Vec2 velocity_px_per_frame,
                                   int64_t start_frame, int64_t max_frames,
                                   const SceneSpec& scene) {
    RawTrajectory t;
    t.pedestrian_id = id;
    Vec2 p = start;
    for (int64_t k = 0; k < max_frames && scene.contains(p); ++k) {
        t.points.push_back({start_frame + k, p});
        p = p + velocity_px_per_frame;
    }
    return t;
}

namespace {

double sample_speed(Rng& rng, const SynthConfig& cfg) {
    return std::max(1.0, rng.normal(cfg.speed_px_mean, cfg.speed_px_std));
}

Vec2 random_point(Rng& rng, const SceneSpec& scene) {
    return {rng.uniform(0.0, scene.width), rng.uniform(0.0, scene.height)};
}

Vec2 random_direction(Rng& rng) {
    const double a = rng.uniform(0.0, 2.0 * M_PI);
    return {std::cos(a), std::sin(a)};
}

}  // namespace

TrajectoryStore synth_crowd(const SynthConfig& config, uint64_t seed) {
    config.validate();
    const int n = config.pedestrians;
    const int n_straight = static_cast<int>(std::lround(config.straight_fraction * n));
    const int n_loiter =
        std::min(n - n_straight, static_cast<int>(std::lround(config.loiter_fraction * n)));

    std::vector<RawTrajectory> out;
    int64_t next_id = 1;

    for (int slot = 0; slot < n; ++slot) {
        Rng rng(derive_seed(seed, static_cast<uint64_t>(slot)));
        if (slot < n_straight) {
            // Chain of constant-velocity walkers; respawn on exit.
            int64_t frame = 0;
            while (frame < config.frames - 1) {
                const Vec2 start = random_point(rng, config.scene);
                const Vec2 vel = random_direction(rng) * sample_speed(rng, config);
                RawTrajectory t = make_straight_walker(next_id, start, vel, frame,
                                                       config.frames - frame, config.scene);
                frame += static_cast<int64_t>(t.points.size()) + 1;
                if (t.points.size() >= 2) {
                    out.push_back(std::move(t));
                    ++next_id;
                }
            }
        } else if (slot < n_straight + n_loiter) {
            RawTrajectory t;
            t.pedestrian_id = next_id++;
            const Vec2 p = random_point(rng, config.scene);
            for (int64_t f = 0; f < config.frames; ++f) t.points.push_back({f, p});
            out.push_back(std::move(t));
        } else {
            // Random-waypoint walker, alive for the whole recording.
            RawTrajectory t;
            t.pedestrian_id = next_id++;
            Vec2 p = random_point(rng, config.scene);
            Vec2 target = random_point(rng, config.scene);
            const double speed = sample_speed(rng, config);
            for (int64_t f = 0; f < config.frames; ++f) {
                t.points.push_back({f, p});
                Vec2 d = target - p;
                double dist = norm(d);
                while (dist < speed) {
                    target = random_point(rng, config.scene);
                    d = target - p;
                    dist = norm(d);
                }
                p = p + d * (speed / dist);
            }
            out.push_back(std::move(t));
        }
    }

    if (config.frames < 2) out.clear();  // nothing can reach the 2-point minimum
    return TrajectoryStore(std::move(out), config.scene);
}

TrajectoryStore make_crossing_corridor_store(const SceneSpec& scene,
                                             const std::vector<double>& crosser_x,
                                             double speed_px, int64_t frames) {
    scene.validate();
    if (frames < 2) throw ValidationError("corridor store needs at least 2 frames");
    if (speed_px <= 0.0) throw ValidationError("speed_px must be positive");

    const double y_lo = std::min(speed_px / 2.0, scene.height / 2.0);
    const double y_hi = scene.height - y_lo;
    const double span = y_hi - y_lo;
    if (span <= 0.0) throw ValidationError("scene too small for crossing pedestrians");

    std::vector<RawTrajectory> out;
    int64_t id = 1;
    for (size_t k = 0; k < crosser_x.size(); ++k) {
        RawTrajectory t;
        t.pedestrian_id = id++;
        // Triangle wave over [y_lo, y_hi]; alternate starting ends.
        const double phase0 = (k % 2 == 0) ? 0.0 : span;
        for (int64_t f = 0; f < frames; ++f) {
            const double s = std::fmod(phase0 + speed_px * static_cast<double>(f), 2.0 * span);
            const double y = (s <= span) ? y_lo + s : y_hi - (s - span);
            t.points.push_back({f, {crosser_x[k], y}});
        }
        out.push_back(std::move(t));
    }
    return TrajectoryStore(std::move(out), scene);
}

}  // namespace crowdnav
