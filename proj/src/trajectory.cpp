#include "crowdnav/trajectory.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace crowdnav {

const TrajectoryPoint* RawTrajectory::at_frame(int64_t frame) const {
    if (points.empty() || frame < first_frame() || frame > last_frame()) return nullptr;
    return &points[static_cast<size_t>(frame - first_frame())];
}

TrajectoryStore::TrajectoryStore(std::vector<RawTrajectory> trajectories, SceneSpec scene)
    : trajectories_(std::move(trajectories)), scene_(scene) {
    scene_.validate();
    std::sort(trajectories_.begin(), trajectories_.end(),
              [](const RawTrajectory& a, const RawTrajectory& b) {
                  return a.pedestrian_id < b.pedestrian_id;
              });
    for (size_t i = 0; i + 1 < trajectories_.size(); ++i) {
        if (trajectories_[i].pedestrian_id == trajectories_[i + 1].pedestrian_id) {
            throw ValidationError("duplicate pedestrian id " +
                                  std::to_string(trajectories_[i].pedestrian_id));
        }
    }
    min_frame_ = 0;
    max_frame_ = -1;
    for (const auto& t : trajectories_) {
        if (t.points.size() < 2) {
            throw ValidationError("trajectory " + std::to_string(t.pedestrian_id) +
                                  " has fewer than 2 points");
        }
        for (size_t i = 0; i < t.points.size(); ++i) {
            if (i > 0 && t.points[i].frame != t.points[i - 1].frame + 1) {
                throw ValidationError("trajectory " + std::to_string(t.pedestrian_id) +
                                      " has non-consecutive frames");
            }
            if (!scene_.contains(t.points[i].pos)) {
                throw ValidationError("trajectory " + std::to_string(t.pedestrian_id) +
                                      " frame " + std::to_string(t.points[i].frame) +
                                      " out of scene bounds");
            }
        }
        if (!has_frames()) {
            min_frame_ = t.first_frame();
            max_frame_ = t.last_frame();
        } else {
            min_frame_ = std::min(min_frame_, t.first_frame());
            max_frame_ = std::max(max_frame_, t.last_frame());
        }
    }
}

const RawTrajectory* TrajectoryStore::find(int64_t pedestrian_id) const {
    auto it = std::lower_bound(trajectories_.begin(), trajectories_.end(), pedestrian_id,
                               [](const RawTrajectory& t, int64_t id) {
                                   return t.pedestrian_id < id;
                               });
    if (it == trajectories_.end() || it->pedestrian_id != pedestrian_id) return nullptr;
    return &*it;
}

size_t TrajectoryStore::total_points() const {
    size_t n = 0;
    for (const auto& t : trajectories_) n += t.points.size();
    return n;
}

bool operator==(const TrajectoryStore& a, const TrajectoryStore& b) {
    if (a.trajectories_.size() != b.trajectories_.size()) return false;
    for (size_t i = 0; i < a.trajectories_.size(); ++i) {
        const auto& ta = a.trajectories_[i];
        const auto& tb = b.trajectories_[i];
        if (ta.pedestrian_id != tb.pedestrian_id || ta.points.size() != tb.points.size()) {
            return false;
        }
        for (size_t j = 0; j < ta.points.size(); ++j) {
            if (ta.points[j].frame != tb.points[j].frame ||
                !(ta.points[j].pos == tb.points[j].pos)) {
                return false;
            }
        }
    }
    return true;
}

TrajectoryStore load_trajectories(std::istream& in, const SceneSpec& scene, LoadReport* report) {
    scene.validate();
    LoadReport rep;

    struct Record {
        int64_t frame;
        Vec2 pos;
    };
    std::map<int64_t, std::vector<Record>> by_id;

    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const auto fields = split_ws(stripped);
        if (fields.size() != 4) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                             std::to_string(fields.size()));
        }
        int64_t id, frame;
        double x, y;
        if (!parse_i64(fields[0], id) || !parse_i64(fields[1], frame)) {
            throw ParseError("line " + std::to_string(line_no) + ": bad pedestrian_id or frame");
        }
        if (!parse_f64(fields[2], x) || !parse_f64(fields[3], y)) {
            throw ParseError("line " + std::to_string(line_no) + ": bad coordinate");
        }
        if (!scene.contains({x, y})) {
            std::ostringstream msg;
            msg << "pedestrian " << id << " frame " << frame << " (line " << line_no
                << "): coordinate (" << x << "," << y << ") outside scene " << scene.width << "x"
                << scene.height;
            throw ValidationError(msg.str());
        }
        by_id[id].push_back({frame, {x, y}});
        ++rep.records;
    }

    rep.input_trajectories = by_id.size();
    int64_t next_fresh_id = 0;
    for (const auto& [id, _] : by_id) next_fresh_id = std::max(next_fresh_id, id + 1);

    std::vector<RawTrajectory> out;
    for (auto& [id, recs] : by_id) {
        std::sort(recs.begin(), recs.end(),
                  [](const Record& a, const Record& b) { return a.frame < b.frame; });
        for (size_t i = 0; i + 1 < recs.size(); ++i) {
            if (recs[i].frame == recs[i + 1].frame) {
                throw ValidationError("pedestrian " + std::to_string(id) + " frame " +
                                      std::to_string(recs[i].frame) + " appears twice");
            }
        }
        // Split at frame gaps into maximal consecutive segments.
        size_t seg_begin = 0;
        bool first_segment = true;
        for (size_t i = 1; i <= recs.size(); ++i) {
            if (i == recs.size() || recs[i].frame != recs[i - 1].frame + 1) {
                const size_t seg_len = i - seg_begin;
                if (!first_segment) ++rep.gap_splits;
                if (seg_len >= 2) {
                    RawTrajectory t;
                    t.pedestrian_id = first_segment ? id : next_fresh_id++;
                    t.points.reserve(seg_len);
                    for (size_t k = seg_begin; k < i; ++k) {
                        t.points.push_back({recs[k].frame, recs[k].pos});
                    }
                    out.push_back(std::move(t));
                    ++rep.kept_trajectories;
                } else {
                    ++rep.dropped_short_segments;
                }
                seg_begin = i;
                first_segment = false;
            }
        }
    }

    if (report) *report = rep;
    return TrajectoryStore(std::move(out), scene);
}

TrajectoryStore load_trajectories(const std::string& path, const SceneSpec& scene,
                                  LoadReport* report) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open trajectory file: " + path);
    return load_trajectories(in, scene, report);
}

void save_trajectories(const TrajectoryStore& store, std::ostream& out) {
    out << "# crowdnav trajectory file v1: pedestrian_id frame x y\n";
    for (const auto& t : store.trajectories()) {
        for (const auto& p : t.points) {
            out << t.pedestrian_id << ' ' << p.frame << ' ' << format_double(p.pos.x) << ' '
                << format_double(p.pos.y) << '\n';
        }
    }
}

void save_trajectories(const TrajectoryStore& store, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write trajectory file: " + path);
    save_trajectories(store, out);
}

TrajectoryStore filter_min_length(const TrajectoryStore& store, size_t min_length) {
    if (min_length < 1) throw ValidationError("min_length must be >= 1");
    std::vector<RawTrajectory> kept;
    for (const auto& t : store.trajectories()) {
        if (t.points.size() >= min_length) kept.push_back(t);
    }
    return TrajectoryStore(std::move(kept), store.scene());
}

GridTrajectory to_grid(const RawTrajectory& traj, const GridSpec& grid) {
    GridTrajectory g;
    g.pedestrian_id = traj.pedestrian_id;
    g.cells.reserve(traj.points.size());
    for (const auto& p : traj.points) {
        g.cells.push_back({p.frame, to_grid(p.pos, grid)});
    }
    return g;
}

std::vector<CellIndex> occupancy_at(const TrajectoryStore& store, int64_t frame,
                                    const GridSpec& grid) {
    if (!store.has_frames() || frame < store.min_frame() || frame > store.max_frame()) {
        throw ValidationError("frame " + std::to_string(frame) + " outside recording range");
    }
    std::vector<CellIndex> cells;
    for (const auto& t : store.trajectories()) {
        if (const TrajectoryPoint* p = t.at_frame(frame)) {
            cells.push_back(to_grid(p->pos, grid));
        }
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
}

}  // namespace crowdnav
