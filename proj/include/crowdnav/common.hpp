#pragma once

#include <charconv>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crowdnav {

inline constexpr const char* kVersion = "0.1.0";

/// Input that could not be tokenized/parsed (bad line, bad field, bad header).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Structurally valid input that violates a domain invariant (bounds, duplicates, ...).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested a move from a planner that has no finite-cost path.
class NoPathError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
    friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

double norm(Vec2 v);

// ---------------------------------------------------------------------------
// Deterministic RNG. std:: distributions are implementation-defined, so all
// randomness in the project goes through these helpers to keep seeded runs
// reproducible across standard libraries.
// ---------------------------------------------------------------------------

uint64_t splitmix64(uint64_t& state);

/// Derive an independent stream seed from a master seed and a stream index.
uint64_t derive_seed(uint64_t master, uint64_t stream);

class Rng {
public:
    explicit Rng(uint64_t seed);

    uint64_t next_u64();
    /// Uniform in [0, 1).
    double uniform();
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);
    /// Uniform integer in [0, n). n must be > 0.
    uint64_t uniform_index(uint64_t n);
    /// Standard normal via Box-Muller.
    double normal();
    double normal(double mean, double stddev);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t s_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// FNV-1a hashing for config/episode-list fingerprints in result metadata.
// ---------------------------------------------------------------------------

class Fnv1a {
public:
    void update(const void* data, size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }
    void update_u64(uint64_t v);
    uint64_t digest() const { return h_; }
    std::string hex() const;

private:
    uint64_t h_ = 0xcbf29ce484222325ull;
};

// ---------------------------------------------------------------------------
// Little-endian binary IO used by the model/checkpoint formats. Explicit byte
// order so files are portable between hosts.
// ---------------------------------------------------------------------------

void write_u32(std::ostream& os, uint32_t v);
void write_u64(std::ostream& os, uint64_t v);
void write_f64(std::ostream& os, double v);
uint32_t read_u32(std::istream& is);
uint64_t read_u64(std::istream& is);
double read_f64(std::istream& is);

// ---------------------------------------------------------------------------
// Number/text helpers.
// ---------------------------------------------------------------------------

/// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double v);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_ws(std::string_view s);
/// Split on a delimiter, keeping empty fields (CSV-style, no quoting).
std::vector<std::string_view> split_on(std::string_view s, char delim);

bool parse_i64(std::string_view s, int64_t& out);
bool parse_f64(std::string_view s, double& out);

}  // namespace crowdnav
