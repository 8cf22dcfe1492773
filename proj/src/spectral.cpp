#include "aperiodiq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "json.hpp"

namespace aperiodiq {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr std::int64_t kMaxSide = 1 << 15;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::vector<std::int64_t> period_of(const LatticeModel& m, const PeriodicConfig& w) {
    if (m.kind() != LatticeKind::Zd) throw UnsupportedError("spectra are only available on Z^d lattices");
    switch (w.kind()) {
        case PeriodicConfig::Kind::Constant:
            return std::vector<std::int64_t>(static_cast<std::size_t>(m.dim()), 1);
        case PeriodicConfig::Kind::Zd:
            if (static_cast<int>(w.period().size()) != m.dim()) throw InputError("configuration period has the wrong dimension");
            return w.period();
        case PeriodicConfig::Kind::Dilation:
            break;
    }
    throw UnsupportedError("configuration has no Z^d period");
}

double hop_max(const TableHop& h) {
    double best = 0;
    for (auto& [k, t] : h.table) best = std::max(best, std::abs(t));
    return best;
}

std::int64_t l1(const Point& p) {
    std::int64_t s = 0;
    for (auto v : p.c) s += v < 0 ? -v : v;
    return s;
}

Point negate(const Point& p) {
    Point q;
    for (int i = 0; i < kMaxDim; ++i) q[i] = -p[i];
    return q;
}

// Cells of prod [0, dims_j), last axis fastest. Amplitude on (u, u + eta) gets exp(i theta . wrap).
ComplexMatrix build(const OperatorSpec& spec, const LatticeModel& m, const PeriodicConfig& w,
                    const std::vector<std::int64_t>& dims, const std::vector<double>& theta) {
    const int d = m.dim();
    if (static_cast<int>(theta.size()) != d) throw InputError("theta needs one entry per axis");
    std::int64_t n = 1;
    for (auto p : dims) {
        if (p < 1) throw InputError("box sides must be positive");
        n *= p;
        if (n > kMaxSide) throw ResourceError("matrix side " + std::to_string(n) + " is too large");
    }
    const auto letters = spec.potential.size();

    std::vector<Point> cells(static_cast<std::size_t>(n));
    {
        Point p;
        for (std::int64_t i = 0; i < n; ++i) {
            cells[static_cast<std::size_t>(i)] = p;
            for (int j = d - 1; j >= 0; --j) {
                if (++p[j] < dims[static_cast<std::size_t>(j)]) break;
                p[j] = 0;
            }
        }
    }
    auto index = [&](const Point& p) {
        std::int64_t i = 0;
        for (int j = 0; j < d; ++j) i = i * dims[static_cast<std::size_t>(j)] + p[j];
        return i;
    };
    // wrapped target and its phase
    auto target = [&](const Point& u, const Point& eta, std::int64_t& col) {
        Point v;
        double phase = 0;
        for (int j = 0; j < d; ++j) {
            std::int64_t x = u[j] + eta[j], pj = dims[static_cast<std::size_t>(j)];
            std::int64_t q = floor_div(x, pj);
            v[j] = x - q * pj;
            phase += theta[static_cast<std::size_t>(j)] * static_cast<double>(q);
        }
        col = index(v);
        return std::polar(1.0, phase);
    };
    auto window = [&](const Point& u, const PointSet& shape) {
        Word key(shape.size(), 0);
        for (std::size_t i = 0; i < shape.size(); ++i) key[i] = w.at(m, m.multiply(u, shape[i]));
        return key;
    };

    ComplexMatrix h = ComplexMatrix::Zero(n, n);
    for (std::int64_t r = 0; r < n; ++r) {
        const Point& u = cells[static_cast<std::size_t>(r)];
        Letter a = w.at(m, u);
        if (a >= letters) throw InputError("letter without a potential");
        double v = spec.potential[a];
        if (spec.bump && !spec.bump->dict->is_legal(spec.bump->shape, window(u, spec.bump->shape))) v += spec.bump->height;
        h(r, r) += v;
        std::int64_t col = 0;
        for (auto& hop : spec.hops) {
            Complex ph = target(u, hop.eta, col);
            h(r, col) += hop.t * ph;
        }
        for (auto& hop : spec.table_hops) {
            Word key = window(u, hop.shape);
            auto it = hop.table.find(key);
            if (it == hop.table.end()) {
                std::string letters_str;
                for (auto c : key) letters_str += std::to_string(c) + ' ';
                throw InputError("configuration/operator mismatch: no amplitude for window [ " + letters_str + "] at " +
                                 to_string(u, d));
            }
            Complex ph = target(u, hop.eta, col);
            h(r, col) += it->second * ph;
        }
    }
    double scale = std::max(1.0, spec.norm_bound());
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NumericError("operator is not self-adjoint on this configuration");
    return h;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

}  // namespace

void OperatorSpec::validate(const LatticeModel& m, std::size_t letters) const {
    if (potential.size() != letters)
        throw InputError("operator has " + std::to_string(potential.size()) + " potentials for " + std::to_string(letters) +
                         " letters");
    for (double v : potential)
        if (!std::isfinite(v)) throw InputError("potential values must be finite");
    auto in_dim = [&](const Point& p) {
        for (int i = m.dim(); i < kMaxDim; ++i)
            if (p[i] != 0) return false;
        return true;
    };
    std::map<Point, Complex> total;
    for (auto& h : hops) {
        if (!in_dim(h.eta)) throw InputError("hop outside the lattice dimension");
        total[h.eta] += h.t;
    }
    for (auto& [eta, t] : total) {
        auto it = total.find(negate(eta));
        if (it == total.end()) throw InputError("hop set is not closed under inversion: " + to_string(eta, m.dim()));
        if (std::abs(it->second - std::conj(t)) > 1e-12 * std::max(1.0, std::abs(t)))
            throw InputError("hop amplitudes at " + to_string(eta, m.dim()) + " break self-adjointness");
    }
    for (auto& h : table_hops) {
        if (!in_dim(h.eta)) throw InputError("hop outside the lattice dimension");
        bool paired = std::any_of(table_hops.begin(), table_hops.end(),
                                  [&](const TableHop& o) { return o.eta == negate(h.eta); });
        if (!paired) throw InputError("table hop without its inverse: " + to_string(h.eta, m.dim()));
        for (auto& [k, t] : h.table)
            if (k.size() != h.shape.size()) throw InputError("table row does not match its window");
    }
    if (bump && !bump->dict) throw InputError("witness bump needs a dictionary");
}

double OperatorSpec::lipschitz() const {
    double l = 0;
    for (auto& h : hops) l += std::abs(h.t) * static_cast<double>(l1(h.eta));
    for (auto& h : table_hops) l += hop_max(h) * static_cast<double>(l1(h.eta));
    return l;
}

double OperatorSpec::norm_bound() const {
    double b = 0;
    for (auto& h : hops) b += std::abs(h.t);
    for (auto& h : table_hops) b += hop_max(h);
    double v = 0;
    for (double p : potential) v = std::max(v, std::abs(p));
    return b + v + (bump ? std::abs(bump->height) : 0.0);
}

bool OperatorSpec::real_amplitudes() const {
    for (auto& h : hops)
        if (h.t.imag() != 0) return false;
    for (auto& h : table_hops)
        for (auto& [k, t] : h.table)
            if (t.imag() != 0) return false;
    return true;
}

OperatorSpec nearest_neighbour(int dim, std::vector<double> potential, double t) {
    OperatorSpec s;
    for (int j = 0; j < dim; ++j)
        for (int sign : {1, -1}) {
            Point p;
            p[j] = sign;
            s.hops.push_back({p, Complex(t, 0)});
        }
    s.potential = std::move(potential);
    return s;
}

OperatorSpec with_witness(OperatorSpec spec, const Dictionary& d, const PointSet& t, double height) {
    spec.bump = WitnessBump{&d, t, height};
    return spec;
}

ComplexMatrix floquet_matrix(const OperatorSpec& spec, const LatticeModel& m, const PeriodicConfig& w,
                             const std::vector<double>& theta) {
    return build(spec, m, w, period_of(m, w), theta);
}

ComplexMatrix torus_matrix(const OperatorSpec& spec, const LatticeModel& m, const PeriodicConfig& w,
                           const std::vector<std::int64_t>& side) {
    auto p = period_of(m, w);
    if (side.size() != p.size()) throw InputError("box needs one side per axis");
    return build(spec, m, w, side, std::vector<double>(p.size(), 0.0));
}

std::vector<double> eigenvalues(ComplexMatrix h) {
    const auto n = static_cast<lapack_int>(h.rows());
    std::vector<double> ev(static_cast<std::size_t>(n));
    if (n == 0) return ev;
    ComplexMatrix keep = h;
    lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'U', n, h.data(), n, ev.data());
    if (info != 0) {
        auto path = std::filesystem::temp_directory_path() / "aperiodiq-failed-matrix.txt";
        std::ofstream out(path);
        out.precision(17);
        out << n << '\n';
        for (lapack_int i = 0; i < n; ++i) {
            for (lapack_int j = 0; j < n; ++j) out << keep(i, j).real() << ' ' << keep(i, j).imag() << ' ';
            out << '\n';
        }
        throw NumericError("zheevd failed with info " + std::to_string(info) + "; matrix written to " + path.string());
    }
    return ev;
}

std::vector<double> eigenvalues_reference(const ComplexMatrix& h) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("Eigen eigensolver did not converge");
    auto v = es.eigenvalues();
    return std::vector<double>(v.data(), v.data() + v.size());
}

SpectrumApprox spectrum(const OperatorSpec& spec, const LatticeModel& m, const PeriodicConfig& w, int grid, Exec exec,
                        bool keep_bands) {
    if (grid < 1) throw InputError("grid must be at least 1");
    auto period = period_of(m, w);
    const int d = m.dim();
    std::size_t total = 1;
    for (int j = 0; j < d; ++j) total *= static_cast<std::size_t>(grid);

    auto digits = [&](std::size_t k) {
        std::vector<int> out(static_cast<std::size_t>(d));
        for (int j = d - 1; j >= 0; --j) {
            out[static_cast<std::size_t>(j)] = static_cast<int>(k % static_cast<std::size_t>(grid));
            k /= static_cast<std::size_t>(grid);
        }
        return out;
    };
    auto mirror = [&](std::size_t k) {
        auto dg = digits(k);
        std::size_t r = 0;
        for (int v : dg) r = r * static_cast<std::size_t>(grid) + static_cast<std::size_t>((grid - v) % grid);
        return r;
    };
    // H(-theta) is the entrywise conjugate of H(theta) when every amplitude is real
    const bool halve = spec.real_amplitudes();
    std::vector<std::size_t> solve;
    for (std::size_t k = 0; k < total; ++k)
        if (!halve || k <= mirror(k)) solve.push_back(k);

    std::vector<std::vector<double>> bands(total);
    for_each_index(solve.size(), exec, [&](std::size_t i) {
        auto dg = digits(solve[i]);
        std::vector<double> theta(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) theta[static_cast<std::size_t>(j)] = kTwoPi * dg[static_cast<std::size_t>(j)] / grid;
        bands[solve[i]] = eigenvalues(build(spec, m, w, period, theta));
    });

    SpectrumApprox out;
    for (auto k : solve) out.samples.insert(out.samples.end(), bands[k].begin(), bands[k].end());
    std::sort(out.samples.begin(), out.samples.end());
    double h = 0;
    for (auto p : period) h = std::max(h, kTwoPi / (static_cast<double>(grid) * static_cast<double>(p)));
    out.error_radius = spec.lipschitz() * h / 2;
    if (keep_bands) {
        for (std::size_t k = 0; k < total; ++k) {
            if (bands[k].empty()) bands[k] = bands[mirror(k)];
            out.theta_index.push_back(digits(k));
        }
        out.bands = std::move(bands);
    }
    return out;
}

namespace {

// sup over x in a of the distance to b; both sorted and nonempty
double directed(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0;
    std::size_t j = 0;
    for (double x : a) {
        while (j + 1 < b.size() && b[j + 1] <= x) ++j;
        double dist = std::abs(x - b[j]);
        if (j + 1 < b.size()) dist = std::min(dist, std::abs(b[j + 1] - x));
        worst = std::max(worst, dist);
    }
    return worst;
}

}  // namespace

double hausdorff_1d(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw InputError("Hausdorff distance needs nonempty sets");
    return std::max(directed(a, b), directed(b, a));
}

double hausdorff_1d(const SpectrumApprox& a, const SpectrumApprox& b) { return hausdorff_1d(a.samples, b.samples); }

double hausdorff_to_interval(const std::vector<double>& a, double lo, double hi) {
    if (a.empty() || lo > hi) throw InputError("Hausdorff distance needs nonempty sets");
    double worst = 0;
    for (double x : a) worst = std::max(worst, x < lo ? lo - x : (x > hi ? x - hi : 0.0));
    auto nearest = [&](double y) {
        auto it = std::lower_bound(a.begin(), a.end(), y);
        double best = std::numeric_limits<double>::infinity();
        if (it != a.end()) best = *it - y;
        if (it != a.begin()) best = std::min(best, y - *(it - 1));
        return best;
    };
    worst = std::max({worst, nearest(lo), nearest(hi)});
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        double c = std::clamp((a[i] + a[i + 1]) / 2, lo, hi);
        worst = std::max(worst, nearest(c));
    }
    return worst;
}

std::vector<Interval> band_intervals(const SpectrumApprox& s) {
    std::vector<Interval> out;
    for (double x : s.samples) {
        if (!out.empty() && x - out.back().hi <= 2 * s.error_radius)
            out.back().hi = x;
        else
            out.push_back({x, x});
    }
    return out;
}

std::string spectrum_csv(const SpectrumApprox& s) {
    if (s.bands.empty()) throw InternalError("spectrum was computed without bands");
    std::ostringstream out;
    for (std::size_t j = 0; j < s.theta_index.front().size(); ++j) out << "k" << j + 1 << ',';
    out << "eigenvalue\n";
    for (std::size_t k = 0; k < s.bands.size(); ++k)
        for (double e : s.bands[k]) {
            for (int v : s.theta_index[k]) out << v << ',';
            out << fmt(e) << '\n';
        }
    return out.str();
}

std::string band_json(const SpectrumApprox& s) {
    nlohmann::ordered_json j;
    j["format"] = 1;
    j["error_radius"] = s.error_radius;
    j["samples"] = s.samples.size();
    auto& iv = j["intervals"] = nlohmann::ordered_json::array();
    for (auto& b : band_intervals(s)) iv.push_back({b.lo, b.hi});
    return j.dump(2);
}

SpectralTable spectral_convergence_table(const Substitution& s, const OperatorSpec& spec, const PeriodicConfig& w0,
                                         int n_max, int grid, double c_bound, std::int64_t max_size, Exec exec) {
    const auto& m = s.model();
    if (n_max < 0) throw InputError("n_max must be >= 0");
    spec.validate(m, s.letters());
    auto p0 = period_of(m, w0);
    const double l0 = m.stretch();

    SpectralTable table;
    std::vector<SpectrumApprox> sigma;
    PeriodicConfig w = w0;
    for (int n = 0; n <= n_max; ++n) {
        long double size = 1;
        for (int j = 0; j < m.dim(); ++j)
            size *= static_cast<long double>(p0[static_cast<std::size_t>(j)]) *
                    std::pow(static_cast<long double>(m.scales()[static_cast<std::size_t>(j)]), n);
        if (size > static_cast<long double>(max_size)) {
            table.capped = true;
            break;
        }
        if (n > 0) w = substitute_periodic(s, w, 1);
        sigma.push_back(spectrum(spec, m, w, grid, exec));
        SpectralRow row;
        row.n = n;
        row.size = static_cast<std::int64_t>(size);
        row.error = sigma.back().error_radius;
        row.bound = c_bound / std::pow(l0, n);
        table.rows.push_back(row);
        table.largest_n = n;
    }
    if (table.rows.empty()) throw ResourceError("the seed itself exceeds the matrix size cap");
    for (std::size_t i = 0; i + 1 < sigma.size(); ++i) table.rows[i].gap = hausdorff_1d(sigma[i], sigma[i + 1]);
    return table;
}

std::string spectral_csv(const SpectralTable& t) {
    std::ostringstream out;
    out << "n,size,gap,error,C_over_lambda_n\n";
    for (auto& r : t.rows) {
        out << r.n << ',' << r.size << ',' << (r.gap ? fmt(*r.gap) : std::string()) << ',' << fmt(r.error) << ','
            << fmt(r.bound) << '\n';
    }
    return out.str();
}

std::string spectral_json(const SpectralTable& t) {
    nlohmann::ordered_json j;
    j["format"] = 1;
    j["largest_n"] = t.largest_n;
    j["capped"] = t.capped;
    auto& rows = j["rows"] = nlohmann::ordered_json::array();
    for (auto& r : t.rows) {
        nlohmann::ordered_json o;
        o["n"] = r.n;
        o["size"] = r.size;
        o["gap"] = r.gap ? nlohmann::ordered_json(*r.gap) : nlohmann::ordered_json(nullptr);
        o["error_radius"] = r.error;
        o["C_over_lambda_n"] = r.bound;
        rows.push_back(o);
    }
    return j.dump(2);
}

}  // namespace aperiodiq
