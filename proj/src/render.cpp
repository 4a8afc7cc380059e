#include "crowdnav/render.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace crowdnav {

namespace {

struct Color {
    uint8_t r, g, b;
};

constexpr Color kBackground{255, 255, 255};
constexpr Color kGridLine{200, 200, 200};
constexpr Color kPedestrian{60, 90, 220};
constexpr Color kRobot{220, 50, 50};
constexpr Color kGoal{40, 160, 60};
constexpr Color kCollision{255, 160, 40};

void fill_cell(Image& img, CellIndex c, int cell_px, Color color) {
    const int x0 = c.col * cell_px;
    const int y0 = c.row * cell_px;
    for (int y = y0; y < y0 + cell_px; ++y) {
        for (int x = x0; x < x0 + cell_px; ++x) {
            img.set(x, y, color.r, color.g, color.b);
        }
    }
}

}  // namespace

void Image::fill(uint8_t r, uint8_t g, uint8_t b) {
    for (size_t i = 0; i + 2 < rgb.size(); i += 3) {
        rgb[i] = r;
        rgb[i + 1] = g;
        rgb[i + 2] = b;
    }
}

void Image::set(int x, int y, uint8_t r, uint8_t g, uint8_t b) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    const size_t i = 3 * (static_cast<size_t>(y) * static_cast<size_t>(width) +
                          static_cast<size_t>(x));
    rgb[i] = r;
    rgb[i + 1] = g;
    rgb[i + 2] = b;
}

void write_ppm(const Image& img, std::ostream& os) {
    os << "P6\n" << img.width << ' ' << img.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.rgb.data()),
             static_cast<std::streamsize>(img.rgb.size()));
}

void write_ppm(const Image& img, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot write image: " + path);
    write_ppm(img, os);
}

Image render_tick(const std::vector<EventLogRow>& rows, int64_t tick, const TrajectoryStore& store,
                  const GridSpec& grid, const RenderOptions& opts) {
    if (opts.cell_px < 2) throw ValidationError("cell_px must be >= 2");

    const EventLogRow* at_tick = nullptr;
    std::vector<CellIndex> collisions;
    for (const EventLogRow& row : rows) {
        if (row.tick != tick) continue;
        at_tick = &row;
        if (row.event_type != "none") collisions.push_back(row.robot);
    }
    if (at_tick == nullptr) throw ValidationError("tick not present in event log");

    Image img;
    img.width = grid.cols * opts.cell_px;
    img.height = grid.rows * opts.cell_px;
    img.rgb.assign(static_cast<size_t>(img.width) * static_cast<size_t>(img.height) * 3, 0);
    img.fill(kBackground.r, kBackground.g, kBackground.b);

    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (x % opts.cell_px == 0 || y % opts.cell_px == 0) {
                img.set(x, y, kGridLine.r, kGridLine.g, kGridLine.b);
            }
        }
    }

    if (grid.in_bounds(opts.goal)) fill_cell(img, opts.goal, opts.cell_px, kGoal);
    for (CellIndex c : occupancy_at(store, at_tick->frame, grid)) {
        fill_cell(img, c, opts.cell_px, kPedestrian);
    }
    for (CellIndex c : collisions) fill_cell(img, c, opts.cell_px, kCollision);
    fill_cell(img, at_tick->robot, opts.cell_px, kRobot);
    return img;
}

size_t render_episode_frames(const std::vector<EventLogRow>& rows, const TrajectoryStore& store,
                             const GridSpec& grid, const std::string& out_dir,
                             const RenderOptions& opts) {
    std::filesystem::create_directories(out_dir);
    std::vector<int64_t> ticks;
    for (const EventLogRow& row : rows) {
        if (row.tick >= 1) ticks.push_back(row.tick);
    }
    std::sort(ticks.begin(), ticks.end());
    ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());

    for (int64_t tick : ticks) {
        const Image img = render_tick(rows, tick, store, grid, opts);
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%04lld.ppm", static_cast<long long>(tick));
        write_ppm(img, out_dir + "/" + name);
    }
    return ticks.size();
}

}  // namespace crowdnav
