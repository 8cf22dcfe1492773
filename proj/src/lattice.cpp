#include "aperiodiq/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace aperiodiq {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw ResourceError("coordinate overflow");
    return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw ResourceError("coordinate overflow");
    return r;
}

std::int64_t checked_pow(std::int64_t a, int n) {
    std::int64_t r = 1;
    for (int i = 0; i < n; ++i) r = checked_mul(r, a);
    return r;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

Point make_point(std::initializer_list<std::int64_t> xs) {
    if (xs.size() > kMaxDim) throw InputError("too many coordinates");
    Point p;
    int i = 0;
    for (auto v : xs) p[i++] = v;
    return p;
}

std::string to_string(const Point& p, int dim) {
    std::ostringstream os;
    os << '(';
    for (int i = 0; i < dim; ++i) os << (i ? "," : "") << p[i];
    os << ')';
    return os.str();
}

PointSet::PointSet(std::vector<Point> pts) : pts_(std::move(pts)) {
    std::sort(pts_.begin(), pts_.end());
    pts_.erase(std::unique(pts_.begin(), pts_.end()), pts_.end());
}

bool PointSet::contains(const Point& p) const { return std::binary_search(pts_.begin(), pts_.end(), p); }

std::size_t PointSet::index_of(const Point& p) const {
    auto it = std::lower_bound(pts_.begin(), pts_.end(), p);
    if (it == pts_.end() || *it != p) return npos;
    return static_cast<std::size_t>(it - pts_.begin());
}

bool PointSet::subset_of(const PointSet& other) const {
    return std::includes(other.pts_.begin(), other.pts_.end(), pts_.begin(), pts_.end());
}

std::size_t point_cap() {
    static const std::size_t cap = [] {
        if (const char* env = std::getenv("APERIODIQ_POINT_CAP")) {
            char* end = nullptr;
            unsigned long long v = std::strtoull(env, &end, 10);
            if (end != env && v > 0) return static_cast<std::size_t>(v);
        }
        return static_cast<std::size_t>(10'000'000);
    }();
    return cap;
}

LatticeModel LatticeModel::zd(std::vector<int> m) {
    if (m.empty() || static_cast<int>(m.size()) > kMaxDim)
        throw InputError("zd lattice needs between 1 and " + std::to_string(kMaxDim) + " block sizes");
    for (int v : m)
        if (v < 2) throw InputError("block sizes must be >= 2");
    LatticeModel L;
    L.kind_ = LatticeKind::Zd;
    L.dim_ = static_cast<int>(m.size());
    L.scale_ = m;
    L.lambda0_ = *std::min_element(m.begin(), m.end());
    for (int v : m) {
        double a = std::log(static_cast<double>(v)) / std::log(static_cast<double>(L.lambda0_));
        L.alpha_.push_back(a);
        int k = 0;
        std::int64_t p = 1;
        while (p < v) {
            p *= L.lambda0_;
            ++k;
        }
        L.alpha_int_.push_back(p == v ? k : 0);
    }
    L.v_lo_ = Rational(-1, 2);
    L.v_hi_ = Rational(1, 2);
    L.r_minus_ = Rational(1, 2);
    L.r_plus_ = Rational(1);
    L.c_minus_ = Rational(2 * L.lambda0_ - 3);
    L.s_ = 4;
    L.c_plus_ = L.r_plus_ * Rational(L.lambda0_, L.lambda0_ - 1);
    L.init_cells();
    return L;
}

LatticeModel LatticeModel::heisenberg(int stretch) {
    if (stretch < 3) throw InputError("heisenberg stretch factor must be >= 3");
    LatticeModel L;
    L.kind_ = LatticeKind::Heisenberg;
    L.dim_ = 3;
    L.lambda0_ = stretch;
    L.scale_ = {stretch, stretch, stretch * stretch};
    L.alpha_ = {1.0, 1.0, 2.0};
    L.alpha_int_ = {1, 1, 2};
    L.v_lo_ = Rational(-1);
    L.v_hi_ = Rational(1);
    L.r_minus_ = Rational(1);
    L.r_plus_ = Rational(3, 2);
    // first branch of the sufficiency construction: (r_-/l)(l - 1 - r_+/r_-)
    L.c_minus_ = (L.r_minus_ / stretch) * (Rational(stretch) - 1 - L.r_plus_ / L.r_minus_);
    L.s_ = 0;
    L.c_plus_ = L.r_plus_ * Rational(stretch, stretch - 1);
    L.init_cells();
    return L;
}

std::string LatticeModel::describe() const {
    std::ostringstream os;
    if (kind_ == LatticeKind::Heisenberg) {
        os << "heisenberg(stretch=" << lambda0_ << ")";
    } else {
        os << "zd(m=";
        for (std::size_t i = 0; i < scale_.size(); ++i) os << (i ? "," : "") << scale_[i];
        os << ")";
    }
    return os.str();
}

bool LatticeModel::is_lattice_point(const Point& g) const {
    for (int i = dim_; i < kMaxDim; ++i)
        if (g[i] != 0) return false;
    if (kind_ == LatticeKind::Heisenberg)
        for (int i = 0; i < 3; ++i)
            if (g[i] % 2 != 0) return false;
    return true;
}

void LatticeModel::check(const Point& g) const {
    if (!is_lattice_point(g)) throw InputError("not a lattice point of " + describe() + ": " + to_string(g, kMaxDim));
}

Point LatticeModel::multiply(const Point& g, const Point& h) const {
    Point r;
    if (kind_ == LatticeKind::Zd) {
        for (int i = 0; i < dim_; ++i) r[i] = checked_add(g[i], h[i]);
        return r;
    }
    r[0] = checked_add(g[0], h[0]);
    r[1] = checked_add(g[1], h[1]);
    std::int64_t twist = checked_add(checked_mul(g[0], h[1]), -checked_mul(g[1], h[0])) / 2;
    r[2] = checked_add(checked_add(g[2], h[2]), twist);
    return r;
}

Point LatticeModel::inverse(const Point& g) const {
    // also right for the Heisenberg law: the twist of g with -g vanishes
    Point r;
    for (int i = 0; i < dim_; ++i) r[i] = -g[i];
    return r;
}

Point LatticeModel::dilate(int n, const Point& g) const {
    if (n == 0) return g;
    Point r;
    for (int i = 0; i < dim_; ++i) r[i] = checked_mul(g[i], checked_pow(scale_[i], n));
    return r;
}

namespace {

// |d| < r^k exactly, for r = p/q > 0
bool below_power(std::int64_t d, Rational r, int k) {
    __int128 lhs = d < 0 ? -static_cast<__int128>(d) : d;
    __int128 p = 1, q = 1;
    const __int128 lim = static_cast<__int128>(1) << 100;
    for (int i = 0; i < k; ++i) {
        p *= r.numerator();
        q *= r.denominator();
        if (p > lim || q > lim) {
            long double rr = static_cast<long double>(r.numerator()) / r.denominator();
            return static_cast<long double>(lhs) < std::pow(rr, static_cast<long double>(k));
        }
    }
    return lhs * q < p;
}

}  // namespace

MetricOrder LatticeModel::metric_compare(const Point& g, const Point& h, Rational r) const {
    if (r <= 0) throw InputError("radius must be positive");
    Point d = multiply(inverse(g), h);
    if (kind_ == LatticeKind::Heisenberg) {
        __int128 x = d[0], y = d[1], z = d[2];
        __int128 s = x * x + y * y;
        __int128 n4 = s * s + z * z;
        __int128 p = r.numerator(), q = r.denominator();
        __int128 q4 = q * q * q * q, p4 = p * p * p * p;
        // both sides stay below 2^127 for coordinates under ~2^20 and small denominators
        long double lhs = static_cast<long double>(n4) * static_cast<long double>(q4);
        if (lhs < 1.0e36L) return n4 * q4 < p4 ? MetricOrder::lt : MetricOrder::geq;
        long double rr = static_cast<long double>(r.numerator()) / r.denominator();
        return std::sqrt(std::sqrt(static_cast<long double>(n4))) < rr ? MetricOrder::lt : MetricOrder::geq;
    }
    for (int i = 0; i < dim_; ++i) {
        if (alpha_int_[i] > 0) {
            if (!below_power(d[i], r, alpha_int_[i])) return MetricOrder::geq;
        } else {
            long double rr = static_cast<long double>(r.numerator()) / r.denominator();
            long double bound = std::pow(rr, static_cast<long double>(alpha_[i])) - 1e-9L;
            if (!(std::fabs(static_cast<long double>(d[i])) < bound)) return MetricOrder::geq;
        }
    }
    return MetricOrder::lt;
}

double LatticeModel::norm(const Point& g) const {
    if (kind_ == LatticeKind::Heisenberg) {
        double x = g[0], y = g[1], z = g[2];
        double s = x * x + y * y;
        return std::sqrt(std::sqrt(s * s + z * z));
    }
    double best = 0;
    for (int i = 0; i < dim_; ++i)
        best = std::max(best, std::pow(std::fabs(static_cast<double>(g[i])), 1.0 / alpha_[i]));
    return best;
}

PointSet LatticeModel::ball_points(const Point& center, Rational r) const {
    if (r <= 0) throw InputError("radius must be positive");
    long double rr = static_cast<long double>(r.numerator()) / r.denominator();
    std::vector<std::int64_t> bound(dim_);
    long double count = 1;
    for (int i = 0; i < dim_; ++i) {
        long double b = std::floor(std::pow(rr, static_cast<long double>(alpha_[i])));
        if (b > 1e15L) throw ResourceError("ball radius too large");
        bound[i] = static_cast<std::int64_t>(b);
        bound[i] -= bound[i] % step();
        count *= static_cast<long double>(2 * (bound[i] / step()) + 1);
    }
    if (count > static_cast<long double>(point_cap()))
        throw ResourceError("ball enumeration of about " + std::to_string(static_cast<double>(count)) +
                            " points exceeds the cap " + std::to_string(point_cap()));
    std::vector<Point> out;
    Point p;
    for (int i = 0; i < dim_; ++i) p[i] = -bound[i];
    Point e = identity();
    while (true) {
        if (distance_lt(e, p, r)) out.push_back(multiply(center, p));
        int i = dim_ - 1;
        while (i >= 0) {
            p[i] += step();
            if (p[i] <= bound[i]) break;
            p[i] = -bound[i];
            --i;
        }
        if (i < 0) break;
    }
    return PointSet(std::move(out));
}

std::vector<std::pair<std::int64_t, std::int64_t>> LatticeModel::box_bounds(int n) const {
    // D^n[V] = prod [v_lo * s^n, v_hi * s^n), as integer half-open bounds on lattice coordinates
    std::vector<std::pair<std::int64_t, std::int64_t>> b(dim_);
    for (int i = 0; i < dim_; ++i) {
        std::int64_t sn = checked_pow(scale_[i], n);
        Rational lo = v_lo_ * sn, hi = v_hi_ * sn;
        std::int64_t l = floor_div(lo.numerator(), lo.denominator());
        if (Rational(l) < lo) ++l;
        std::int64_t h = floor_div(hi.numerator(), hi.denominator());
        if (Rational(h) < hi) ++h;
        b[i] = {l, h};
    }
    return b;
}

PointSet LatticeModel::dilated_box(int n) const {
    auto b = box_bounds(n);
    long double count = 1;
    for (auto& [l, h] : b) count *= static_cast<long double>(h - l) / step();
    if (count > static_cast<long double>(point_cap())) throw ResourceError("box enumeration exceeds the cap");
    std::vector<Point> out;
    Point p;
    auto first = [&](int i) {
        std::int64_t v = b[i].first;
        while (((v % step()) + step()) % step() != 0) ++v;
        return v;
    };
    for (int i = 0; i < dim_; ++i) p[i] = first(i);
    while (true) {
        out.push_back(p);
        int i = dim_ - 1;
        while (i >= 0) {
            p[i] += step();
            if (p[i] < b[i].second) break;
            p[i] = first(i);
            --i;
        }
        if (i < 0) break;
    }
    return PointSet(std::move(out));
}

void LatticeModel::init_cells() { cells_ = dilated_box(1); }

std::vector<Point> LatticeModel::support_sequence(int n, const std::vector<Point>& m) const {
    if (n < 0) throw InputError("support level must be >= 0");
    std::vector<Point> cur = m;
    for (int lvl = 0; lvl < n; ++lvl) {
        long double next = static_cast<long double>(cur.size()) * cells_.size();
        if (next > static_cast<long double>(point_cap()))
            throw ResourceError("support of size " + std::to_string(static_cast<double>(next)) + " exceeds the cap");
        std::vector<Point> out;
        out.reserve(cur.size() * cells_.size());
        for (auto& g : cur) {
            Point dg = dilate(1, g);
            for (auto& k : cells_) out.push_back(multiply(dg, k));
        }
        cur = std::move(out);
    }
    return cur;
}

PointSet LatticeModel::support(int n, const PointSet& m) const {
    return PointSet(support_sequence(n, m.points()));
}

std::pair<Point, Point> LatticeModel::split_once(const Point& p) const {
    Point g, k;
    if (kind_ == LatticeKind::Zd) {
        for (int i = 0; i < dim_; ++i) {
            std::int64_t m = scale_[i];
            g[i] = floor_div(p[i] + m / 2, m);
            k[i] = p[i] - m * g[i];
        }
        return {g, k};
    }
    // x = l*gx + kx with gx even and kx in [-l, l) even; same for y; then z absorbs the twist
    std::int64_t l = lambda0_;
    for (int i = 0; i < 2; ++i) {
        g[i] = 2 * floor_div(p[i] + l, 2 * l);
        k[i] = p[i] - l * g[i];
    }
    // D(g) k has z = l^2 gz + kz + (l/2)(gx ky - kx gy)
    std::int64_t twist = checked_mul(l, checked_add(checked_mul(g[0], k[1]), -checked_mul(k[0], g[1]))) / 2;
    std::int64_t w = p[2] - twist;
    g[2] = 2 * floor_div(w + l * l, 2 * l * l);
    k[2] = w - l * l * g[2];
    return {g, k};
}

std::pair<Point, Point> LatticeModel::quotient_decompose(int n, const Point& g) const {
    if (n < 1) throw InputError("quotient_decompose needs n >= 1");
    Point rest = g;
    Point kappa = identity();
    for (int i = 0; i < n; ++i) {
        auto [up, k] = split_once(rest);
        kappa = multiply(dilate(i, k), kappa);
        rest = up;
    }
    return {rest, kappa};
}

bool LatticeModel::in_support(int n, const Point& p) const {
    Point cur = p;
    for (int i = 0; i < n; ++i) cur = split_once(cur).first;
    return cur == identity();
}

std::pair<Point, Point> LatticeModel::quotient_decompose_search(int n, const Point& g) const {
    if (n < 1) throw InputError("quotient_decompose needs n >= 1");
    PointSet ln = support(n, PointSet({identity()}));
    // approximate D^{-n} g, rounded onto the lattice
    Point guess;
    double real[kMaxDim] = {};
    for (int i = 0; i < dim_; ++i) {
        real[i] = static_cast<double>(g[i]) / std::pow(static_cast<double>(scale_[i]), n);
        guess[i] = static_cast<std::int64_t>(std::llround(real[i] / step())) * step();
    }
    if (kind_ == LatticeKind::Heisenberg) {
        // pick z so that guess^-1 * D^-n(g) has a small centre coordinate
        double z = real[2] - 0.5 * (guess[0] * real[1] - guess[1] * real[0]);
        guess[2] = static_cast<std::int64_t>(std::llround(z / 2)) * 2;
    }
    PointSet cand = ball_points(guess, c_plus_ + 2);
    std::vector<std::pair<Point, Point>> found;
    for (auto& eta : cand) {
        Point k = multiply(inverse(dilate(n, eta)), g);
        if (ln.contains(k)) found.emplace_back(eta, k);
    }
    if (found.size() != 1)
        throw InternalError("ball search found " + std::to_string(found.size()) + " decompositions of " +
                            to_string(g, dim_));
    return found.front();
}

}  // namespace aperiodiq
