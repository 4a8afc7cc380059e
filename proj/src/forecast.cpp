#include "crowdnav/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace crowdnav {

void OccupancyForecast::normalize() {
    for (auto& cells : steps) {
        std::sort(cells.begin(), cells.end());
        cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    }
}

bool OccupancyForecast::occupied(int step, CellIndex c) const {
    const auto& cells = steps.at(static_cast<size_t>(step - 1));
    return std::binary_search(cells.begin(), cells.end(), c);
}

void OccupancyForecast::merge(const OccupancyForecast& other) {
    for (int i = 0; i < kHorizon; ++i) {
        auto& dst = steps[static_cast<size_t>(i)];
        const auto& src = other.steps[static_cast<size_t>(i)];
        dst.insert(dst.end(), src.begin(), src.end());
    }
    normalize();
}

OccupancyForecast baseline_forecast(const std::vector<CellIndex>& current_cells,
                                    const GridSpec& grid, int radius) {
    if (radius < 0) throw ValidationError("baseline radius must be >= 0");
    std::vector<CellIndex> ball;
    for (CellIndex c : current_cells) {
        if (!grid.in_bounds(c)) throw ValidationError("baseline_forecast: cell out of bounds");
        for (int dr = -radius; dr <= radius; ++dr) {
            for (int dc = -radius; dc <= radius; ++dc) {
                const CellIndex n{c.col + dc, c.row + dr};
                if (grid.in_bounds(n)) ball.push_back(n);
            }
        }
    }
    std::sort(ball.begin(), ball.end());
    ball.erase(std::unique(ball.begin(), ball.end()), ball.end());

    OccupancyForecast f;
    for (auto& step : f.steps) step = ball;
    return f;
}

OccupancyForecast targets_to_forecast(const ForecastTargets& t, Vec2 origin, const GridSpec& grid) {
    OccupancyForecast f;
    for (int k = 0; k < kHorizon; ++k) {
        const Vec2 p{origin.x + t[static_cast<size_t>(2 * k)],
                     origin.y + t[static_cast<size_t>(2 * k + 1)]};
        f.steps[static_cast<size_t>(k)] = {to_grid(p, grid)};
    }
    return f;
}

DisplacementVolume encode_displacement_volume(const std::array<Vec2, kHistoryLen>& last5,
                                              const SceneSpec& scene) {
    scene.validate();
    for (const Vec2& p : last5) {
        if (!scene.contains(p)) throw ValidationError("displacement volume: point out of scene");
    }
    const Vec2 anchor = last5.back();
    std::array<double, 10> v;
    for (int i = 0; i < kHistoryLen; ++i) {
        v[static_cast<size_t>(2 * i)] = 1.0 + (anchor.x - last5[static_cast<size_t>(i)].x) / scene.width;
        v[static_cast<size_t>(2 * i + 1)] =
            1.0 + (anchor.y - last5[static_cast<size_t>(i)].y) / scene.height;
    }
    DisplacementVolume dv;
    dv.scene = scene;
    dv.entries[{static_cast<int64_t>(std::floor(anchor.x)),
                static_cast<int64_t>(std::floor(anchor.y))}] = v;
    return dv;
}

ExternalForecasts load_external_forecast(std::istream& in) {
    ExternalForecasts out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const auto fields = split_ws(stripped);
        if (fields.size() != 2 + kTargetCount) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(2 + kTargetCount) + " fields, got " +
                             std::to_string(fields.size()));
        }
        int64_t id = 0;
        int64_t frame = 0;
        if (!parse_i64(fields[0], id) || !parse_i64(fields[1], frame)) {
            throw ParseError("line " + std::to_string(line_no) + ": bad id/frame");
        }
        ForecastTargets t{};
        for (int k = 0; k < kTargetCount; ++k) {
            if (!parse_f64(fields[static_cast<size_t>(2 + k)], t[static_cast<size_t>(k)])) {
                throw ParseError("line " + std::to_string(line_no) + ": bad displacement value");
            }
        }
        if (!out.by_id_frame.emplace(std::make_pair(id, frame), t).second) {
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": duplicate forecast for pedestrian " + std::to_string(id) +
                                  " frame " + std::to_string(frame));
        }
    }
    return out;
}

ExternalForecasts load_external_forecast(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open forecast file: " + path);
    return load_external_forecast(in);
}

void save_external_forecast(std::ostream& os, const ExternalForecasts& f) {
    os << "# crowdnav forecast file v1: pedestrian_id frame dx1 dy1 dx2 dy2 dx3 dy3 dx4 dy4 dx5 dy5\n";
    for (const auto& [key, t] : f.by_id_frame) {
        os << key.first << ' ' << key.second;
        for (double v : t) os << ' ' << format_double(v);
        os << '\n';
    }
}

double nmse(const std::vector<Vec2>& predictions, const std::vector<Vec2>& truths,
            const SceneSpec& scene) {
    if (predictions.size() != truths.size()) {
        throw ValidationError("nmse: prediction/truth length mismatch");
    }
    if (predictions.empty()) throw ValidationError("nmse: no points");
    scene.validate();
    double sum = 0.0;
    for (size_t i = 0; i < predictions.size(); ++i) {
        const double ex = (truths[i].x - predictions[i].x) / scene.width;
        const double ey = (truths[i].y - predictions[i].y) / scene.height;
        sum += std::sqrt(ex * ex + ey * ey);
    }
    return sum / static_cast<double>(predictions.size());
}

}  // namespace crowdnav
