#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aperiodiq/dictionary.hpp"
#include "aperiodiq/exec.hpp"

namespace aperiodiq {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

// (H psi)(x) = sum over hops of t_eta(window at x) psi(x + eta) + V(w(x)) psi(x)
struct Hop {
    Point eta;
    Complex t{1.0, 0.0};
};
// amplitude read from the window w|_{x + shape}; rows must cover every window that occurs
struct TableHop {
    Point eta;
    PointSet shape;
    std::map<Word, Complex> table;
};
// extra potential on cells whose shape-window is illegal
struct WitnessBump {
    const Dictionary* dict = nullptr;
    PointSet shape;
    double height = 100;
};

struct OperatorSpec {
    std::vector<Hop> hops;
    std::vector<TableHop> table_hops;
    std::vector<double> potential;  // per letter
    std::optional<WitnessBump> bump;

    // hop set closed under inversion; constant amplitudes satisfy t_{-eta} = conj(t_eta)
    void validate(const LatticeModel& m, std::size_t letters) const;
    // sum over hops of max |t_eta| * |eta|_1
    double lipschitz() const;
    // sum over hops of max |t_eta| + max |V| (+ bump)
    double norm_bound() const;
    bool real_amplitudes() const;
};

// t = 1 on the 2d unit hops
OperatorSpec nearest_neighbour(int dim, std::vector<double> potential, double t = 1.0);
// `spec` plus the bump on illegal t-windows
OperatorSpec with_witness(OperatorSpec spec, const Dictionary& d, const PointSet& t, double height = 100);

// N x N with N = prod p_j; cells in lexicographic order over prod [0, p_j)
ComplexMatrix floquet_matrix(const OperatorSpec& spec, const LatticeModel& m, const PeriodicConfig& w,
                             const std::vector<double>& theta);
// zheevd; NumericError (matrix written to a temp file) if it fails
std::vector<double> eigenvalues(ComplexMatrix h);
// Eigen's self-adjoint solver, for cross-checks
std::vector<double> eigenvalues_reference(const ComplexMatrix& h);

// the operator restricted to the box prod [0, side_j) with periodic boundary conditions
ComplexMatrix torus_matrix(const OperatorSpec& spec, const LatticeModel& m, const PeriodicConfig& w,
                           const std::vector<std::int64_t>& side);

struct SpectrumApprox {
    std::vector<double> samples;  // sorted
    double error_radius = 0;
    // per grid point, when requested: index vector and its eigenvalues
    std::vector<std::vector<int>> theta_index;
    std::vector<std::vector<double>> bands;
};
// theta_j = 2 pi k / grid, k = 0..grid-1. Real amplitudes: theta and -theta share eigenvalues,
// so only half the grid is solved.
SpectrumApprox spectrum(const OperatorSpec& spec, const LatticeModel& m, const PeriodicConfig& w, int grid,
                        Exec exec = Exec::parallel, bool keep_bands = false);

// exact distance between sorted finite sets; InputError when either is empty
double hausdorff_1d(const std::vector<double>& a, const std::vector<double>& b);
double hausdorff_1d(const SpectrumApprox& a, const SpectrumApprox& b);
double hausdorff_to_interval(const std::vector<double>& a, double lo, double hi);

struct Interval {
    double lo = 0, hi = 0;
};
// samples joined when closer than 2 * error_radius
std::vector<Interval> band_intervals(const SpectrumApprox& s);

std::string spectrum_csv(const SpectrumApprox& s);
std::string band_json(const SpectrumApprox& s);

struct SpectralRow {
    int n = 0;
    std::int64_t size = 0;  // matrix side at level n
    double error = 0;       // error_radius of sigma_n
    // to the next level; absent on the last row
    std::optional<double> gap;
    double bound = 0;  // C / l0^n
};
struct SpectralTable {
    std::vector<SpectralRow> rows;
    int largest_n = 0;  // last level under the size cap
    bool capped = false;
};
SpectralTable spectral_convergence_table(const Substitution& s, const OperatorSpec& spec, const PeriodicConfig& w0,
                                         int n_max, int grid, double c_bound, std::int64_t max_size = 4096,
                                         Exec exec = Exec::parallel);
std::string spectral_csv(const SpectralTable& t);
std::string spectral_json(const SpectralTable& t);

}  // namespace aperiodiq
