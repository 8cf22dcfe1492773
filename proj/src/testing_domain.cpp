#include "aperiodiq/testing_domain.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include <omp.h>

namespace aperiodiq {

namespace {

double to_double(Rational r) { return boost::rational_cast<double>(r); }

// smallest multiple of 1/64 that is >= v
Rational upper_rational(double v) { return Rational(static_cast<std::int64_t>(std::ceil(v * 64.0 + 1e-9)), 64); }

// sup of |v| over the closure of V
double v_sup_norm(const LatticeModel& m) {
    if (m.kind() == LatticeKind::Heisenberg) {
        double h = to_double(m.v_hi());
        double s = 2 * h * h;
        return std::sqrt(std::sqrt(s * s + h * h * h * h));
    }
    double best = 0;
    for (double a : m.alpha()) best = std::max(best, std::pow(0.5, 1.0 / a));
    return best;
}

// V(s) for Z^d as half-open real boxes [a_j, b_j)
std::vector<std::pair<Rational, Rational>> zd_level_box(const LatticeModel& m, int s) {
    std::vector<std::pair<Rational, Rational>> box(static_cast<std::size_t>(m.dim()), {m.v_lo(), m.v_hi()});
    auto ceil_r = [](Rational r) {
        std::int64_t f = floor_div(r.numerator(), r.denominator());
        return Rational(f) == r ? f : f + 1;
    };
    for (int lvl = 1; lvl <= s; ++lvl) {
        for (std::size_t j = 0; j < box.size(); ++j) {
            // lattice points of the previous level, thickened by V, then dilated
            std::int64_t lo = ceil_r(box[j].first);
            std::int64_t hi = ceil_r(box[j].second) - 1;
            box[j] = {(Rational(lo) + m.v_lo()) * m.scales()[j], (Rational(hi) + m.v_hi()) * m.scales()[j]};
        }
    }
    return box;
}

}  // namespace

SufficiencyWitness sufficiency_witness(const LatticeModel& m) {
    if (m.kind() == LatticeKind::Zd) {
        const int s = 4;
        const std::int64_t r = 2 * m.stretch();
        auto box = zd_level_box(m, s);
        Point z;
        for (int j = 0; j < m.dim(); ++j) {
            auto [a, b] = box[static_cast<std::size_t>(j)];
            Rational c = (a + b) / 2;
            std::int64_t zj = floor_div(c.numerator() * 2 + c.denominator(), 2 * c.denominator());
            z[j] = zj;
            double reach = std::pow(static_cast<double>(r), m.alpha()[static_cast<std::size_t>(j)]);
            double room = std::min(to_double(Rational(zj) - a), to_double(b - Rational(zj)));
            if (reach > room + 1e-9) throw NoResultError("no ball of radius 2*l0 fits in V(4)");
        }
        return {Rational(r) - m.r_plus() - Rational(r, m.stretch()), s, z};
    }
    Rational ratio = m.r_plus() / m.r_minus();
    if (Rational(m.stretch()) > 1 + ratio)
        return {(m.r_minus() / m.stretch()) * (Rational(m.stretch()) - 1 - ratio), 0, m.identity()};
    throw NoResultError("stretch factor too small for the first sufficiency branch");
}

bool validate_witness(const LatticeModel& m, const SufficiencyWitness& w, int nmax) {
    for (int n = 1; n <= nmax; ++n) {
        Rational r = w.c_minus * checked_pow(m.stretch(), n);
        for (auto& p : m.ball_points(m.dilate(n, w.z), r))
            if (!m.in_support(w.s + n, p)) return false;
    }
    return true;
}

PointSet box_shape(const LatticeModel& m, const std::vector<std::pair<std::int64_t, std::int64_t>>& bounds) {
    if (static_cast<int>(bounds.size()) != m.dim()) throw InputError("box bounds do not match the dimension");
    std::vector<Point> out;
    Point p;
    auto first = [&](int i) {
        std::int64_t v = bounds[static_cast<std::size_t>(i)].first;
        while (((v % m.step()) + m.step()) % m.step() != 0) ++v;
        return v;
    };
    for (int i = 0; i < m.dim(); ++i) {
        p[i] = first(i);
        if (p[i] > bounds[static_cast<std::size_t>(i)].second) return PointSet();
    }
    while (true) {
        out.push_back(p);
        int i = m.dim() - 1;
        while (i >= 0) {
            p[i] += m.step();
            if (p[i] <= bounds[static_cast<std::size_t>(i)].second) break;
            p[i] = first(i);
            --i;
        }
        if (i < 0) break;
    }
    return PointSet(std::move(out));
}

PointSet base_shape(const LatticeModel& m) {
    if (m.kind() == LatticeKind::Heisenberg) return box_shape(m, {{-2, 0}, {-2, 0}, {-6, 6}});
    return box_shape(m, std::vector<std::pair<std::int64_t, std::int64_t>>(static_cast<std::size_t>(m.dim()), {0, 1}));
}

CanonicalDomain canonical_domain(const LatticeModel& m, bool zd_override) {
    auto w = sufficiency_witness(m);
    const double rho = v_sup_norm(m);
    const double cm = to_double(w.c_minus);
    CanonicalDomain c;
    c.s1 = w.s;
    c.s2 = 1;
    while (!(rho < cm * std::pow(m.stretch(), c.s2))) ++c.s2;
    const double room = cm * std::pow(m.stretch(), c.s2) - rho;
    c.delta = m.r_minus() / 2;
    while (to_double(c.delta) > room - 1e-12) c.delta /= 2;
    c.c_t = 1 / c.delta;
    if (zd_override && m.kind() == LatticeKind::Zd) {
        c.domain = base_shape(m);
        c.c_t = Rational(2 * m.stretch());
        c.delta = 1 / c.c_t;
        return c;
    }
    c.domain = m.support(c.s1 + c.s2, PointSet({m.identity()}));
    return c;
}

bool in_inflated(const LatticeModel& m, const Point& g, int n, const PointSet& t, const Point& p) {
    Point q = m.multiply(m.inverse(m.dilate(n, g)), p);
    for (int i = 0; i < n; ++i) q = m.split_once(q).first;
    return t.contains(q);
}

CoverResult cover_check(const LatticeModel& m, const PointSet& a, const PointSet& b, int n, Exec exec) {
    if (a.empty() || b.empty()) throw InputError("cover check needs nonempty shapes");
    CoverResult res;
    res.xs = m.support(n, PointSet({m.identity()})).points();
    res.witnesses.assign(res.xs.size(), Point{});
    std::vector<char> found(res.xs.size(), 0);
    std::vector<Point> binv;
    for (auto& p : b) binv.push_back(m.inverse(p));
    std::atomic<std::size_t> first_fail{res.xs.size()};
    for_each_index(res.xs.size(), exec, [&](std::size_t i) {
        if (i > first_fail.load(std::memory_order_relaxed)) return;
        const Point& x = res.xs[i];
        Point eta = m.quotient_decompose(n, m.multiply(x, a[0])).first;
        for (auto& bi : binv) {
            Point g = m.multiply(eta, bi);
            bool all = true;
            for (auto& p : a)
                if (!in_inflated(m, g, n, b, m.multiply(x, p))) {
                    all = false;
                    break;
                }
            if (all) {
                res.witnesses[i] = g;
                found[i] = 1;
                return;
            }
        }
        std::size_t cur = first_fail.load();
        while (i < cur && !first_fail.compare_exchange_weak(cur, i)) {
        }
    });
    std::size_t ff = first_fail.load();
    res.ok = ff == res.xs.size();
    if (!res.ok) res.failure = res.xs[ff];
    return res;
}

VerifyResult verify_domain(const LatticeModel& m, const PointSet& reference, const PointSet& candidate, int n0,
                           Exec exec) {
    if (n0 < 1) throw InputError("N0 must be >= 1");
    if (reference.empty() || candidate.empty()) throw InputError("domains must be nonempty");
    double rt = 0;
    for (auto& g : candidate) rt = std::max(rt, m.norm(g));
    Rational radius = upper_rational(rt + 1) + 2 * m.c_plus();
    std::vector<Point> ball = m.ball_points(m.identity(), radius).points();
    std::stable_sort(ball.begin(), ball.end(), [&](const Point& p, const Point& q) { return m.norm(p) < m.norm(q); });

    VerifyResult res;
    auto& cert = res.certificate;
    cert.reference = reference;
    cert.domain = candidate;
    cert.n0 = n0;
    cert.xs = m.dilated_box(n0).points();
    cert.witnesses.assign(cert.xs.size(), Point{});
    std::atomic<std::size_t> first_fail{cert.xs.size()};
    for_each_index(cert.xs.size(), exec, [&](std::size_t i) {
        if (i > first_fail.load(std::memory_order_relaxed)) return;
        const Point& x = cert.xs[i];
        Point eta = m.quotient_decompose(n0, x).first;
        std::vector<Point> xt;
        xt.reserve(reference.size());
        for (auto& t : reference) xt.push_back(m.multiply(x, t));
        for (auto& b : ball) {
            Point g = m.multiply(eta, b);
            bool all = true;
            for (auto& p : xt)
                if (!in_inflated(m, g, n0, candidate, p)) {
                    all = false;
                    break;
                }
            if (all) {
                cert.witnesses[i] = g;
                return;
            }
        }
        std::size_t cur = first_fail.load();
        while (i < cur && !first_fail.compare_exchange_weak(cur, i)) {
        }
    });
    std::size_t ff = first_fail.load();
    res.ok = ff == cert.xs.size();
    if (!res.ok) res.failure = cert.xs[ff];
    return res;
}

bool recheck_certificate(const LatticeModel& m, const DomainCertificate& c) {
    PointSet inflated = m.support(c.n0, c.domain);
    for (std::size_t i = 0; i < c.xs.size(); ++i) {
        Point dg = m.dilate(c.n0, c.witnesses[i]);
        for (auto& t : c.reference) {
            Point p = m.multiply(m.inverse(dg), m.multiply(c.xs[i], t));
            if (!inflated.contains(p)) return false;
        }
    }
    return true;
}

int compute_n_t(const LatticeModel& m, const PointSet& t, int m_max) {
    for (int k = 1; k <= m_max; ++k)
        if (cover_check(m, t, t, k).ok) return k;
    throw NoResultError("no self-covering step up to " + std::to_string(m_max));
}

Reduction reduce_domain(const LatticeModel& m, const PointSet& start, int n0, Exec exec) {
    Reduction red;
    red.start = start;
    PointSet cur = start;
    const Point e = m.identity();

    auto attempt = [&](const std::vector<Point>& removed) -> bool {
        std::vector<Point> keep;
        for (auto& p : cur)
            if (!std::binary_search(removed.begin(), removed.end(), p)) keep.push_back(p);
        if (keep.empty() || keep.size() == cur.size()) return false;
        PointSet cand(std::move(keep));
        if (!cand.contains(e) && cur.contains(e)) return false;
        // cheap exact screen first; the certificate itself comes from the ball search
        if (!cover_check(m, cur, cand, n0, exec).ok) return false;
        auto v = verify_domain(m, cur, cand, n0, exec);
        if (!v.ok) return false;
        red.steps.push_back({cand, v.certificate});
        cur = cand;
        return true;
    };

    while (true) {
        // slabs: extreme layers along each axis, farthest first
        std::vector<std::pair<double, std::vector<Point>>> slabs;
        for (int j = 0; j < m.dim(); ++j) {
            std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = std::numeric_limits<std::int64_t>::min();
            for (auto& p : cur) {
                lo = std::min(lo, p[j]);
                hi = std::max(hi, p[j]);
            }
            for (std::int64_t v : {lo, hi}) {
                std::vector<Point> layer;
                double far = 0;
                for (auto& p : cur)
                    if (p[j] == v) {
                        layer.push_back(p);
                        far = std::max(far, m.norm(p));
                    }
                slabs.push_back({far, layer});
                if (lo == hi) break;
            }
        }
        std::stable_sort(slabs.begin(), slabs.end(), [](auto& a, auto& b) { return a.first > b.first; });
        bool moved = false;
        for (auto& [far, layer] : slabs)
            if (attempt(layer)) {
                moved = true;
                break;
            }
        if (moved) continue;
        std::vector<Point> pts(cur.begin(), cur.end());
        std::stable_sort(pts.begin(), pts.end(), [&](const Point& a, const Point& b) { return m.norm(a) > m.norm(b); });
        for (auto& p : pts) {
            if (p == e) continue;
            if (attempt({p})) {
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    return red;
}

}  // namespace aperiodiq
