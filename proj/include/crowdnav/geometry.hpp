#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>

#include "crowdnav/common.hpp"

namespace crowdnav {

/// Pixel dimensions and frame rate of the recorded scene.
struct SceneSpec {
    double width = 1920.0;   // X, pixels
    double height = 1080.0;  // Y, pixels
    double fps = 1.5;

    void validate() const;
    bool contains(Vec2 p) const { return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height; }
    double diagonal() const;
};

struct CellIndex {
    int col = 0;
    int row = 0;

    friend bool operator==(CellIndex a, CellIndex b) { return a.col == b.col && a.row == b.row; }
    friend bool operator!=(CellIndex a, CellIndex b) { return !(a == b); }
    friend bool operator<(CellIndex a, CellIndex b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    }
};

std::string to_string(CellIndex c);

/// Discretization of the scene into cols x rows cells of cell_w x cell_h pixels.
struct GridSpec {
    int cols = 64;
    int rows = 36;
    double cell_w = 30.0;
    double cell_h = 30.0;

    static GridSpec from_scene(const SceneSpec& scene, int cols = 64, int rows = 36);

    void validate() const;
    int cell_count() const { return cols * rows; }
    bool in_bounds(CellIndex c) const { return c.col >= 0 && c.col < cols && c.row >= 0 && c.row < rows; }
    int index_of(CellIndex c) const { return c.row * cols + c.col; }
    CellIndex cell_at(int index) const { return {index % cols, index / cols}; }
    Vec2 cell_center(CellIndex c) const {
        return {(c.col + 0.5) * cell_w, (c.row + 0.5) * cell_h};
    }
};

/// Discretize a pixel position. Points on the right/bottom scene edge clamp to the
/// last cell (closed-world scene).
CellIndex to_grid(Vec2 p, const GridSpec& grid);

/// Chebyshev distance: path length on an empty 8-connected grid under unit move cost.
int chebyshev(CellIndex a, CellIndex b);

/// The 8 grid moves in fixed enumeration order N, NE, E, SE, S, SW, W, NW.
/// Rows grow downward (image coordinates), so N is row-1.
inline constexpr std::array<std::array<int, 2>, 8> kNeighborOffsets = {{
    {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1},
}};

}  // namespace crowdnav

template <>
struct std::hash<crowdnav::CellIndex> {
    size_t operator()(crowdnav::CellIndex c) const noexcept {
        return std::hash<uint64_t>{}((static_cast<uint64_t>(static_cast<uint32_t>(c.row)) << 32) |
                                     static_cast<uint32_t>(c.col));
    }
};
