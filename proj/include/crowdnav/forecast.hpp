#pragma once

#include <map>
#include <utility>

#include "crowdnav/features.hpp"
#include "crowdnav/geometry.hpp"

namespace crowdnav {

// Predicted occupancy over horizon steps 1..5. Cell lists are kept sorted and
// deduplicated so lookups can binary-search and unions stay canonical.
struct OccupancyForecast {
    std::array<std::vector<CellIndex>, kHorizon> steps;

    void normalize();
    /// step in 1..kHorizon.
    bool occupied(int step, CellIndex c) const;
    void merge(const OccupancyForecast& other);

    friend bool operator==(const OccupancyForecast& a, const OccupancyForecast& b) {
        return a.steps == b.steps;
    }
};

/// Radius-r Chebyshev neighborhood of every current cell, clipped to the grid
/// and asserted at every horizon step.
OccupancyForecast baseline_forecast(const std::vector<CellIndex>& current_cells,
                                    const GridSpec& grid, int radius = 1);

/// Map regression displacements onto grid cells, clamping out-of-scene points
/// to the border cell.
OccupancyForecast targets_to_forecast(const ForecastTargets& t, Vec2 origin, const GridSpec& grid);

// Eq-style sparse volume: a 10-vector of normalized offset displacements at
// each pedestrian's current pixel (floored), all-zero cells elided.
struct DisplacementVolume {
    SceneSpec scene;
    std::map<std::pair<int64_t, int64_t>, std::array<double, 10>> entries;
};

DisplacementVolume encode_displacement_volume(const std::array<Vec2, kHistoryLen>& last5,
                                              const SceneSpec& scene);

struct ExternalForecasts {
    std::map<std::pair<int64_t, int64_t>, ForecastTargets> by_id_frame;
};

ExternalForecasts load_external_forecast(std::istream& in);
ExternalForecasts load_external_forecast(const std::string& path);
void save_external_forecast(std::ostream& os, const ExternalForecasts& f);

/// Pooled normalized distance error: mean over points of
/// sqrt(((x-x̂)/X)² + ((y-ŷ)/Y)²).
double nmse(const std::vector<Vec2>& predictions, const std::vector<Vec2>& truths,
            const SceneSpec& scene);

}  // namespace crowdnav
