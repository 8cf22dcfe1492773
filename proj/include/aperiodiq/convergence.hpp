#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "aperiodiq/dictionary.hpp"

namespace aperiodiq {

using BigInt = boost::multiprecision::cpp_int;

// G_S(T, N): vertices are all of A^T, edges run from an illegal P to the illegal T-windows of S^N(P).
// Successors are computed on first request and memoized.
class SubstitutionGraph {
public:
    SubstitutionGraph(const Dictionary& d, PointSet t, int n, Exec exec = Exec::parallel);

    const Dictionary& dictionary() const { return *d_; }
    const PointSet& shape() const { return t_; }
    int step() const { return n_; }
    Exec exec() const { return exec_; }
    // |A|^|T|
    BigInt vertex_count() const;

    bool legal(const Word& w) const { return d_->is_legal(t_, w); }
    // every T-window of S^N(w), sorted
    std::vector<Word> children(const Word& w) const;
    // the illegal ones; empty for legal w
    const std::vector<Word>& successors(const Word& w) const;

private:
    const Dictionary* d_;
    PointSet t_;
    int n_;
    Exec exec_;
    ExpansionPlan plan_;
    mutable std::mutex mu_;
    mutable std::unordered_map<Word, std::vector<Word>, WordHash> memo_;
};

struct MaterializedGraph {
    std::vector<Word> vertices;  // lexicographic in the letter indices
    std::vector<char> legal;
    std::vector<std::vector<std::uint32_t>> edges;
    std::size_t index(const Word& w) const;
};

// Every vertex and edge; ResourceError when |A|^|T| exceeds the point cap.
MaterializedGraph build_graph(const SubstitutionGraph& g);

enum class Verdict { converges, diverges };

struct ConvergenceCertificate {
    Verdict verdict = Verdict::converges;
    // diverges: a path from a start window into a cycle; path[cycle_from..] is closed
    std::vector<Word> path;
    std::size_t cycle_from = 0;
    BigInt n0_bound;      // |A^T| * N
    int longest = 0;      // converges: most illegal vertices on a path from the start
    int n0_measured = 0;  // longest * N
    std::size_t start_windows = 0, start_illegal = 0, explored = 0;
};

// Iterative three-colour DFS over illegal vertices reachable from `start`.
ConvergenceCertificate certify(const SubstitutionGraph& g, const WordSet& start);
ConvergenceCertificate certify(const SubstitutionGraph& g, const PeriodicConfig& w0);

// Longest path (in edges) through illegal vertices from `start`, nullopt when unbounded.
// Kahn's algorithm, independent of the DFS in certify.
std::optional<std::size_t> condition_iv(const SubstitutionGraph& g, const WordSet& start);

// W(S^N(w))_T from W(w)_T
WordSet step_windows(const SubstitutionGraph& g, const WordSet& windows);
// W(S^n(w))_T inside W(S)_T, for n a multiple of N, by window-set iteration (periodic sets are folded)
bool recheck(const SubstitutionGraph& g, const WordSet& start, const BigInt& n);
// every illegal T-window of S^N(w) has an illegal parent among the T-windows of w
bool previous_step_holds(const SubstitutionGraph& g, const PeriodicConfig& w);

std::string certificate_json(const SubstitutionGraph& g, const ConvergenceCertificate& c);

struct DeltaResult {
    int n = 0;
    std::int64_t r_star = 0;
    Rational delta;
    bool saturated = false;  // r_star hit r_max, so delta is only an upper bound
};
// 1 / (r* + 1), r* the largest integer radius <= r_max with W(S^n(w0))_{B(e,r)} = W(S)_{B(e,r)}.
// Z^d uses box names and bisection (agreement is monotone in r).
DeltaResult measure_delta(const Dictionary& d, const PeriodicConfig& w0, int n, std::int64_t r_max);
// explicit word sets, increasing r; any lattice
DeltaResult measure_delta_generic(const Dictionary& d, const PeriodicConfig& w0, int n, std::int64_t r_max);

struct RateConstants {
    Rational c_lr, c_minus, c_t;
    int s = 0, n0 = 0, lambda0 = 2;
    double c = 0, m1 = 0;
};
// C = max{C_LR / C_- * l0^s, C_T * l0^n0}, M1 = log C / log l0
RateConstants rate_constants(const LatticeModel& m, Rational c_lr, int n0);

struct RateRow {
    int n = 0;
    std::int64_t r_star = 0;
    Rational delta;
    bool saturated = false;
    double bound = 0;  // C / l0^n
};
struct RateReport {
    std::vector<RateRow> rows;
    RateConstants constants;
    int lin_rep_radius = 0;
    double slope = 0, intercept = 0;  // least squares of log delta_n against n, unsaturated rows
    double lower_c = 0;               // min over rows of delta_n * l0^n
};
RateReport rate_report(const Dictionary& d, const PeriodicConfig& w0, int n0, int n_max, std::int64_t r_max,
                       int lin_rep_radius = 3);
std::string rate_csv(const RateReport& r);
std::string rate_json(const RateReport& r);

}  // namespace aperiodiq
