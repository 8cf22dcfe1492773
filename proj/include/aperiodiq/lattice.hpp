#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "aperiodiq/errors.hpp"

namespace aperiodiq {

using Rational = boost::rational<std::int64_t>;

constexpr int kMaxDim = 4;

// Unused trailing coordinates stay zero, so comparison and hashing ignore the dimension.
struct Point {
    std::array<std::int64_t, kMaxDim> c{};

    std::int64_t& operator[](int i) { return c[i]; }
    std::int64_t operator[](int i) const { return c[i]; }
    auto operator<=>(const Point&) const = default;
    bool operator==(const Point&) const = default;
};

struct PointHash {
    std::size_t operator()(const Point& p) const noexcept {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (auto v : p.c) {
            h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

Point make_point(std::initializer_list<std::int64_t> xs);
std::string to_string(const Point& p, int dim);

// Sorted, duplicate-free set of lattice points.
class PointSet {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    PointSet() = default;
    explicit PointSet(std::vector<Point> pts);

    std::size_t size() const { return pts_.size(); }
    bool empty() const { return pts_.empty(); }
    const Point& operator[](std::size_t i) const { return pts_[i]; }
    auto begin() const { return pts_.begin(); }
    auto end() const { return pts_.end(); }
    const std::vector<Point>& points() const { return pts_; }

    bool contains(const Point& p) const;
    std::size_t index_of(const Point& p) const;
    bool subset_of(const PointSet& other) const;
    bool operator==(const PointSet&) const = default;

private:
    std::vector<Point> pts_;
};

enum class LatticeKind { Zd, Heisenberg };
enum class MetricOrder { lt, geq };

// Max number of points any single enumeration may produce.
// APERIODIQ_POINT_CAP overrides the default of 10^7.
std::size_t point_cap();

// One of the two shipped backends: Z^d with block dilation x -> (m_1 x_1, ..., m_d x_d),
// or the Heisenberg lattice H3(2Z) with D(x,y,z) = (lx, ly, l^2 z).
class LatticeModel {
public:
    static LatticeModel zd(std::vector<int> m);
    static LatticeModel heisenberg(int stretch = 4);

    LatticeKind kind() const { return kind_; }
    int dim() const { return dim_; }
    int stretch() const { return lambda0_; }
    // Z^d: the block sizes m_j. Heisenberg: {l, l, l^2}.
    const std::vector<int>& scales() const { return scale_; }
    const std::vector<double>& alpha() const { return alpha_; }
    // spacing of lattice points along each axis (2 for the Heisenberg lattice)
    int step() const { return kind_ == LatticeKind::Heisenberg ? 2 : 1; }
    std::string describe() const;

    Rational r_minus() const { return r_minus_; }
    Rational r_plus() const { return r_plus_; }
    Rational c_minus() const { return c_minus_; }
    int s() const { return s_; }
    Rational c_plus() const { return c_plus_; }
    // V = prod [v_lo, v_hi)
    Rational v_lo() const { return v_lo_; }
    Rational v_hi() const { return v_hi_; }

    Point identity() const { return Point{}; }
    bool is_lattice_point(const Point& g) const;
    void check(const Point& g) const;

    Point multiply(const Point& g, const Point& h) const;
    Point inverse(const Point& g) const;
    Point dilate(int n, const Point& g) const;

    MetricOrder metric_compare(const Point& g, const Point& h, Rational r) const;
    bool distance_lt(const Point& g, const Point& h, Rational r) const {
        return metric_compare(g, h, r) == MetricOrder::lt;
    }
    // floating-point norm, only for ordering candidates and reporting
    double norm(const Point& g) const;
    double distance(const Point& g, const Point& h) const { return norm(multiply(inverse(g), h)); }

    PointSet ball_points(const Point& center, Rational r) const;
    // K = D[V] intersected with the lattice, in lexicographic order
    const PointSet& seed_cells() const { return cells_; }

    // L(n, M): L(0,M) = M, L(n,M) = { D(g) k : g in L(n-1,M), k in K }
    PointSet support(int n, const PointSet& m) const;
    // same points, in construction order: index (i * |K| + j) <-> D(prev[i]) K[j]
    std::vector<Point> support_sequence(int n, const std::vector<Point>& m) const;

    // p = D(g) k with k in K
    std::pair<Point, Point> split_once(const Point& p) const;
    // g = D^n(eta) kappa with kappa in L(n, {e})
    std::pair<Point, Point> quotient_decompose(int n, const Point& g) const;
    // slow route: ball search around an approximate preimage; used as a cross-check
    std::pair<Point, Point> quotient_decompose_search(int n, const Point& g) const;
    bool in_support(int n, const Point& p) const;

    // D^n[V] intersected with the lattice (lexicographic)
    PointSet dilated_box(int n) const;

private:
    LatticeKind kind_ = LatticeKind::Zd;
    int dim_ = 0;
    int lambda0_ = 2;
    std::vector<int> scale_;
    std::vector<double> alpha_;
    std::vector<int> alpha_int_;  // 0 when alpha_j is not an integer
    Rational r_minus_, r_plus_, c_minus_, c_plus_;
    Rational v_lo_, v_hi_;
    int s_ = 0;
    PointSet cells_;

    void init_cells();
    // axis bounds of D^n[V], as integers lo <= x < hi
    std::vector<std::pair<std::int64_t, std::int64_t>> box_bounds(int n) const;
};

// overflow-checked helpers; throw ResourceError
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);
std::int64_t checked_pow(std::int64_t a, int n);
std::int64_t floor_div(std::int64_t a, std::int64_t b);

}  // namespace aperiodiq
