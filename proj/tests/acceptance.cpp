// Acceptance run: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion numbers...]   (default: all)
// Exit status is nonzero only for failures not listed in kKnownFailures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "aperiodiq/catalog.hpp"
#include "aperiodiq/convergence.hpp"
#include "aperiodiq/spectral.hpp"

using namespace aperiodiq;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

// documented in README.md; the check itself is unchanged
const std::set<int> kKnownFailures = {7};

std::string rat(const Rational& r) {
    return std::to_string(r.numerator()) + (r.denominator() == 1 ? "" : "/" + std::to_string(r.denominator()));
}

Outcome c1_graph_size() {
    auto f = table_tiling();
    Dictionary d(f.sub);
    auto t = base_shape(f.sub.model());
    int nt = compute_n_t(f.sub.model(), t);
    SubstitutionGraph g(d, t, nt);
    auto mg = build_graph(g);
    std::size_t edges = 0;
    for (auto& e : mg.edges) edges += e.size();
    return {mg.vertices.size() == 256 && nt == 1,
            std::to_string(mg.vertices.size()) + " vertices, " + std::to_string(edges) + " edges, N_T = " + std::to_string(nt)};
}

Outcome c2_letters_diverge() {
    auto f = table_tiling();
    Dictionary d(f.sub);
    const auto& m = f.sub.model();
    auto t = base_shape(m);
    SubstitutionGraph g(d, t, 1);
    bool ok = true;
    std::ostringstream os;
    for (Letter a = 0; a < 4; ++a) {
        auto w = PeriodicConfig::constant(a);
        auto c = certify(g, w);
        auto start = window_patches(m, w, t);
        bool good = c.verdict == Verdict::diverges && c.path.size() >= 2 && start.count(c.path.front()) &&
                    c.path.back() == c.path[c.cycle_from];
        for (std::size_t i = 0; good && i + 1 < c.path.size(); ++i) {
            auto& next = g.successors(c.path[i]);
            good = !g.legal(c.path[i]) && std::find(next.begin(), next.end(), c.path[i + 1]) != next.end();
        }
        ok = ok && good;
        os << "\n      " << f.sub.alphabet().names[a] << ":";
        for (std::size_t i = c.cycle_from; i < c.path.size(); ++i)
            os << (i > c.cycle_from ? " ->" : "") << " [" << render_word(f.sub.alphabet(), c.path[i]) << "]";
    }
    return {ok, "closed paths of illegal windows:" + os.str()};
}

Outcome c3_checkerboards_converge() {
    auto f = table_tiling();
    Dictionary d(f.sub);
    const auto& m = f.sub.model();
    auto t = base_shape(m);
    SubstitutionGraph g(d, t, 1);
    bool ok = true;
    std::ostringstream os;
    for (auto name : {"rb", "gy"}) {
        auto w = f.seed(name);
        auto c = certify(g, w);
        auto windows = window_patches(m, w, t);
        bool subset = true;
        for (auto& p : windows) subset = subset && d.is_legal(t, p);
        ok = ok && c.verdict == Verdict::converges && subset;
        os << name << ": " << (c.verdict == Verdict::converges ? "converges" : "diverges") << ", " << windows.size()
           << " windows all legal = " << (subset ? "yes" : "no") << "; ";
    }
    return {ok, os.str()};
}

Outcome c4_heisenberg_chain() {
    auto m = LatticeModel::heisenberg(4);
    PointSet v1 = m.seed_cells();
    PointSet t1 = box_shape(m, {{-2, 0}, {-2, 0}, {-12, 12}});
    PointSet tp = box_shape(m, {{-2, 0}, {-2, 0}, {-6, 6}});
    auto a = verify_domain(m, v1, t1, 1);
    auto b = verify_domain(m, t1, tp, 1);
    bool ok = a.ok && b.ok && recheck_certificate(m, a.certificate) && recheck_certificate(m, b.certificate) &&
              v1.size() == 256 && tp.size() == 28 && tp == base_shape(m);
    return {ok, std::to_string(v1.size()) + " -> " + std::to_string(t1.size()) + " -> " + std::to_string(tp.size()) +
                    " with N0 = 1; certificates rechecked"};
}

Outcome c5_heisenberg_converges() {
    auto f = heisenberg_example();
    const auto& m = f.sub.model();
    Dictionary d(f.sub);
    auto tp = base_shape(m);
    SubstitutionGraph g(d, tp, compute_n_t(m, tp));
    bool ok = true;
    std::ostringstream os;
    for (Letter a = 0; a < 2; ++a) {
        auto c = certify(g, PeriodicConfig::constant(a));
        ok = ok && c.verdict == Verdict::converges;
        // the constant window occurs in S(a) on K: direct patch comparison
        auto patch = f.sub.iterate_letter(a, 1);
        Word constant(tp.size(), a);
        std::vector<Point> at;
        for (auto& x : box_shape(m, {{-8, 8}, {-8, 8}, {-32, 32}}))
            if (auto w = patch.window(m, x, tp); w && *w == constant) at.push_back(x);
        bool found = !at.empty();
        if (a == 0) found = found && std::find(at.begin(), at.end(), make_point({0, 0, 6})) != at.end();
        ok = ok && found;
        os << f.sub.alphabet().names[a] << ": " << (c.verdict == Verdict::converges ? "converges" : "diverges")
           << ", constant T' window inside S(" << f.sub.alphabet().names[a] << ")|K at " << at.size() << " translates"
           << (at.empty() ? "" : " e.g. " + to_string(at.front(), 3)) << "; ";
    }
    return {ok, os.str()};
}

Outcome c6_n_t() {
    std::ostringstream os;
    bool ok = true;
    for (int d = 1; d <= 3; ++d) {
        auto m = LatticeModel::zd(std::vector<int>(static_cast<std::size_t>(d), 2));
        int n = compute_n_t(m, base_shape(m));
        ok = ok && n == 1;
        os << "Z^" << d << ": " << n << "; ";
    }
    auto h = LatticeModel::heisenberg(4);
    int n = compute_n_t(h, base_shape(h));
    ok = ok && n == 1;
    os << "Heisenberg T': " << n;
    return {ok, os.str()};
}

// shared by 7 and 8
const RateReport& table_rate() {
    static const RateReport rep = [] {
        auto f = table_tiling();
        Dictionary d(f.sub);
        SubstitutionGraph g(d, base_shape(f.sub.model()), 1);
        auto c = certify(g, f.seed("rb"));
        return rate_report(d, f.seed("rb"), c.n0_measured, 5, 256);
    }();
    return rep;
}

Outcome c7_rate() {
    const auto& rep = table_rate();
    double chat = boost::rational_cast<double>(rep.constants.c_lr);
    bool bound_ok = true;
    std::ostringstream os;
    os << "C_LR >= " << rat(rep.constants.c_lr) << "; delta_n:";
    for (auto& r : rep.rows) {
        double delta = boost::rational_cast<double>(r.delta);
        bound_ok = bound_ok && !r.saturated && delta <= std::max(2 * chat, 4.0) / std::pow(2.0, r.n);
        os << ' ' << rat(r.delta);
    }
    const double target = -std::log(2.0);
    bool slope_ok = std::abs(rep.slope - target) <= 0.15 * std::abs(target);
    char buf[160];
    std::snprintf(buf, sizeof buf, "; bound %s; slope %.4f vs %.4f +-15%% %s", bound_ok ? "holds" : "FAILS", rep.slope,
                  target, slope_ok ? "ok" : "out of range");
    os << buf;
    return {bound_ok && slope_ok, os.str()};
}

Outcome c8_lower_bound() {
    const auto& rep = table_rate();
    char buf[120];
    std::snprintf(buf, sizeof buf, "min_n delta_n 2^n = %.4f", rep.lower_c);
    return {rep.lower_c > 0 && std::isfinite(rep.lower_c), buf};
}

Outcome c9_spectral() {
    auto f = table_tiling();
    auto spec = nearest_neighbour(2, {0, 1, 2, 3});
    auto t = spectral_convergence_table(f.sub, spec, f.seed("rb"), 4, 32, 1.0);
    bool ok = !t.capped && t.rows.size() == 5;
    std::vector<double> adjusted;
    std::ostringstream os;
    os << "gap - err:";
    for (std::size_t n = 0; ok && n + 1 < t.rows.size(); ++n) {
        double g = *t.rows[n].gap;
        ok = ok && std::isfinite(g);
        double err = t.rows[n].error + t.rows[n + 1].error;
        adjusted.push_back(std::max(0.0, g - err));
        char buf[64];
        std::snprintf(buf, sizeof buf, " %.4f(%.4f)", adjusted.back(), g);
        os << buf;
    }
    for (std::size_t n = 2; ok && n + 1 < adjusted.size(); ++n) {
        ok = adjusted[n] > 0 ? adjusted[n + 1] <= 0.75 * adjusted[n] : adjusted[n + 1] == 0;
        char buf[64];
        std::snprintf(buf, sizeof buf, "; ratio n=%zu: %.3f", n, adjusted[n] > 0 ? adjusted[n + 1] / adjusted[n] : 0.0);
        os << buf;
    }
    return {ok, os.str()};
}

Outcome c10_oracle() {
    auto f = table_tiling();
    Dictionary d(f.sub);
    auto t = base_shape(f.sub.model());
    int sat = 0;
    auto oracle = oracle_dictionary(f.sub, t, 12, &sat);
    bool ok = d.legal(t) == oracle;
    std::size_t agree = 0;
    for (int code = 0; code < 256; ++code) {
        Word w(4, 0);
        for (int i = 0; i < 4; ++i) w[static_cast<std::size_t>(i)] = static_cast<Letter>((code >> (2 * (3 - i))) & 3);
        agree += d.is_legal(t, w) == (oracle.count(w) == 1);
    }
    ok = ok && agree == 256;
    return {ok, std::to_string(oracle.size()) + " legal windows, oracle saturated at n = " + std::to_string(sat) +
                    ", is_legal agrees on " + std::to_string(agree) + "/256"};
}

Outcome c11_free_operator() {
    auto m = LatticeModel::zd({2, 2});
    auto sp = spectrum(nearest_neighbour(2, {0.0}), m, PeriodicConfig::constant(0), 64);
    double dh = hausdorff_to_interval(sp.samples, -4, 4);
    char buf[120];
    std::snprintf(buf, sizeof buf, "d_H(samples, [-4,4]) = %.5f <= error_radius %.5f", dh, sp.error_radius);
    return {dh <= sp.error_radius, buf};
}

Outcome c12_algebra() {
    std::vector<LatticeModel> backends{LatticeModel::zd({2, 2}), LatticeModel::zd({3, 3, 3}), LatticeModel::heisenberg(4)};
    constexpr int kCases = 10000;
    std::mt19937_64 rng(2024);
    std::ostringstream os;
    bool ok = true;
    for (auto& m : backends) {
        auto pt = [&](std::int64_t span) {
            std::uniform_int_distribution<std::int64_t> u(-span, span);
            Point p;
            for (int i = 0; i < m.dim(); ++i) p[i] = u(rng) * m.step();
            return p;
        };
        const auto& k = m.seed_cells();
        auto digit = [&] { return k[rng() % k.size()]; };
        int fails[4] = {0, 0, 0, 0};
        for (int i = 0; i < kCases; ++i) {
            Point g = pt(1000), h = pt(1000), q = pt(1000);
            // group axioms
            if (m.multiply(m.multiply(g, h), q) != m.multiply(g, m.multiply(h, q)) || m.multiply(g, m.identity()) != g ||
                m.multiply(m.identity(), g) != g || m.multiply(g, m.inverse(g)) != m.identity() ||
                m.multiply(m.inverse(g), g) != m.identity())
                ++fails[0];
            // dilation is an automorphism and scales the metric by l0
            Rational r(static_cast<std::int64_t>(rng() % 4000) + 1, static_cast<std::int64_t>(rng() % 7) + 1);
            if (m.dilate(1, m.multiply(g, h)) != m.multiply(m.dilate(1, g), m.dilate(1, h)) ||
                m.dilate(2, g) != m.dilate(1, m.dilate(1, g)) ||
                m.metric_compare(m.dilate(1, g), m.dilate(1, h), r * Rational(m.stretch())) != m.metric_compare(g, h, r))
                ++fails[1];
            // V(1, V(1, M)) = V(2, M): a point built as D(D(a) k1) k2 with a in M lies in L(2, M) (closed-form
            // decomposition), and a random point lies in one iff it lies in the other (digit splitting)
            std::vector<Point> mset{pt(50), pt(50)};
            Point a = mset[rng() % 2];
            Point built = m.multiply(m.dilate(1, m.multiply(m.dilate(1, a), digit())), digit());
            auto [eta, kappa] = m.quotient_decompose(2, built);
            bool in_two = std::find(mset.begin(), mset.end(), eta) != mset.end() && m.in_support(2, kappa);
            Point probe = m.multiply(m.dilate(2, mset[rng() % 2]), pt(40));
            Point outer = m.split_once(probe).first;
            bool nested = std::find(mset.begin(), mset.end(), m.split_once(outer).first) != mset.end();
            auto [eta2, kappa2] = m.quotient_decompose(2, probe);
            bool direct = std::find(mset.begin(), mset.end(), eta2) != mset.end();
            if (!in_two || nested != direct) ++fails[2];
            // quotient_decompose round trip
            int n = 1 + static_cast<int>(rng() % 3);
            auto [e3, k3] = m.quotient_decompose(n, g);
            if (m.multiply(m.dilate(n, e3), k3) != g || !m.in_support(n, k3)) ++fails[3];
        }
        // explicit set equality for a few small cases
        for (int i = 0; i < 3 && m.kind() == LatticeKind::Zd; ++i) {
            PointSet mset({pt(20), pt(20)});
            if (m.support(1, m.support(2, mset)) != m.support(3, mset)) ++fails[2];
        }
        int total = fails[0] + fails[1] + fails[2] + fails[3];
        ok = ok && total == 0;
        os << m.describe() << ": " << kCases << " cases x 4 suites, " << total << " failures; ";
    }
    return {ok, os.str()};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<Criterion> all{
        {1, "graph size", c1_graph_size},
        {2, "single letters diverge", c2_letters_diverge},
        {3, "checkerboards converge", c3_checkerboards_converge},
        {4, "Heisenberg testing-domain chain", c4_heisenberg_chain},
        {5, "Heisenberg constants converge", c5_heisenberg_converges},
        {6, "N_T values", c6_n_t},
        {7, "dynamical rate", c7_rate},
        {8, "lower-bound sanity", c8_lower_bound},
        {9, "spectral convergence", c9_spectral},
        {10, "oracle equivalence", c10_oracle},
        {11, "free-operator gold", c11_free_operator},
        {12, "algebra property suites", c12_algebra},
    };
    std::set<int> pick;
    for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));

    int unexpected = 0;
    for (auto& c : all) {
        if (!pick.empty() && !pick.count(c.id)) continue;
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const char* tag = o.pass ? "PASS" : (kKnownFailures.count(c.id) ? "FAIL (known)" : "FAIL");
        if (!o.pass && !kKnownFailures.count(c.id)) ++unexpected;
        std::printf("%-12s %2d %s [%.1f s]: %s\n", tag, c.id, c.name, secs, o.detail.c_str());
        std::fflush(stdout);
    }
    return unexpected == 0 ? 0 : 1;
}
