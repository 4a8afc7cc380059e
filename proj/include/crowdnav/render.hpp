#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crowdnav/simulator.hpp"
#include "crowdnav/trajectory.hpp"

namespace crowdnav {

/// Fixed-palette raster frame, written as binary PPM (P6).
struct Image {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> rgb;  // 3 bytes per pixel, row-major

    void fill(uint8_t r, uint8_t g, uint8_t b);
    void set(int x, int y, uint8_t r, uint8_t g, uint8_t b);
};

void write_ppm(const Image& img, std::ostream& os);
void write_ppm(const Image& img, const std::string& path);

struct RenderOptions {
    int cell_px = 8;
    CellIndex goal{-1, -1};  // drawn when in bounds
};

/// Rasterize one tick of an event log: grid lines, pedestrian cells,
/// collision highlights, the robot cell, and optionally the goal cell.
Image render_tick(const std::vector<EventLogRow>& rows, int64_t tick, const TrajectoryStore& store,
                  const GridSpec& grid, const RenderOptions& opts = {});

/// Write frame_<tick>.ppm for every tick >= 1 in the log (tick 0 is the
/// initial placement and gets no image). Returns the number of files written.
size_t render_episode_frames(const std::vector<EventLogRow>& rows, const TrajectoryStore& store,
                             const GridSpec& grid, const std::string& out_dir,
                             const RenderOptions& opts = {});

}  // namespace crowdnav
