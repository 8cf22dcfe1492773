#pragma once

#include <optional>
#include <vector>

#include "aperiodiq/exec.hpp"
#include "aperiodiq/lattice.hpp"

namespace aperiodiq {

struct SufficiencyWitness {
    Rational c_minus;
    int s = 0;
    Point z;
};

// z, s, C_- with D^n[B(z, C_-)] inside V(s + n) for all n
SufficiencyWitness sufficiency_witness(const LatticeModel& m);
// lattice points of B(D^n z, l0^n C_-) lie in L(s + n, {e}) for n = 1..nmax
bool validate_witness(const LatticeModel& m, const SufficiencyWitness& w, int nmax);

struct CanonicalDomain {
    PointSet domain;
    Rational c_t;
    int s1 = 0, s2 = 0;
    Rational delta;
};

// Generic construction T0 = L(s1 + s2, {e}). With zd_override, Z^d gets {0,1}^d and C_T = 2 l0.
CanonicalDomain canonical_domain(const LatticeModel& m, bool zd_override = true);

// {0,1}^d on Z^d, {-2,0}^2 x {-6..6} on the Heisenberg lattice
PointSet base_shape(const LatticeModel& m);
// { p : p in prod [lo_j, hi_j], on the lattice }
PointSet box_shape(const LatticeModel& m, const std::vector<std::pair<std::int64_t, std::int64_t>>& bounds);

// membership of p in D^n(g) L(n, T)
bool in_inflated(const LatticeModel& m, const Point& g, int n, const PointSet& t, const Point& p);

struct CoverResult {
    bool ok = false;
    std::vector<Point> xs;         // points checked
    std::vector<Point> witnesses;  // gamma_x, parallel to xs (only meaningful when ok)
    std::optional<Point> failure;  // first x without a witness
};

// Exact test: every x in L(n, {e}) has gamma with x A inside D^n(gamma) L(n, B).
// Candidates are gamma = eta * b^-1 with (eta, .) the decomposition of x * A[0]; that list is complete.
CoverResult cover_check(const LatticeModel& m, const PointSet& a, const PointSet& b, int n, Exec exec = Exec::parallel);

struct DomainCertificate {
    PointSet reference;
    PointSet domain;
    int n0 = 1;
    std::vector<Point> xs;
    std::vector<Point> witnesses;
};

struct VerifyResult {
    bool ok = false;
    DomainCertificate certificate;
    std::optional<Point> failure;
};

// Ball-search verification: for each x in D^n0[V] on the lattice, look for gamma with
// x T0 inside D^n0(gamma) L(n0, T) among lattice points near D^-n0(x).
VerifyResult verify_domain(const LatticeModel& m, const PointSet& reference, const PointSet& candidate, int n0 = 1,
                           Exec exec = Exec::parallel);
// recheck every witnessed containment by explicit point sets
bool recheck_certificate(const LatticeModel& m, const DomainCertificate& c);

// least m in 1..m_max with cover_check(T, T, m); NoResultError otherwise
int compute_n_t(const LatticeModel& m, const PointSet& t, int m_max = 6);

struct ReductionStep {
    PointSet domain;
    DomainCertificate certificate;  // against the previous step
};

struct Reduction {
    PointSet start;
    std::vector<ReductionStep> steps;
    const PointSet& result() const { return steps.empty() ? start : steps.back().domain; }
};

// Greedy shrink: slab removals first, then single points, each candidate checked against the current domain.
Reduction reduce_domain(const LatticeModel& m, const PointSet& start, int n0 = 1, Exec exec = Exec::parallel);

}  // namespace aperiodiq
