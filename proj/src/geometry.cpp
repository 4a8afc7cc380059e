#include "crowdnav/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace crowdnav {

void SceneSpec::validate() const {
    if (width <= 0.0 || height <= 0.0 || fps <= 0.0) {
        throw ValidationError("scene spec requires positive width, height, and fps");
    }
}

double SceneSpec::diagonal() const { return std::sqrt(width * width + height * height); }

std::string to_string(CellIndex c) {
    return "(" + std::to_string(c.col) + "," + std::to_string(c.row) + ")";
}

GridSpec GridSpec::from_scene(const SceneSpec& scene, int cols, int rows) {
    scene.validate();
    if (cols <= 0 || rows <= 0) throw ValidationError("grid requires positive cols and rows");
    GridSpec g;
    g.cols = cols;
    g.rows = rows;
    g.cell_w = scene.width / cols;
    g.cell_h = scene.height / rows;
    return g;
}

void GridSpec::validate() const {
    if (cols <= 0 || rows <= 0 || cell_w <= 0.0 || cell_h <= 0.0) {
        throw ValidationError("grid spec requires positive dimensions");
    }
}

CellIndex to_grid(Vec2 p, const GridSpec& grid) {
    int col = static_cast<int>(std::floor(p.x / grid.cell_w));
    int row = static_cast<int>(std::floor(p.y / grid.cell_h));
    col = std::clamp(col, 0, grid.cols - 1);
    row = std::clamp(row, 0, grid.rows - 1);
    return {col, row};
}

int chebyshev(CellIndex a, CellIndex b) {
    return std::max(std::abs(a.col - b.col), std::abs(a.row - b.row));
}

}  // namespace crowdnav
