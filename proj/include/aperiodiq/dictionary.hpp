#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "aperiodiq/exec.hpp"
#include "aperiodiq/substitution.hpp"
#include "aperiodiq/testing_domain.hpp"

namespace aperiodiq {

// {0,1}^d on Z^d, {0,2}^3 on the Heisenberg lattice. Both cover themselves after one step.
PointSet closure_shape(const LatticeModel& m);

// Windows of S^k(P) for P on `from`, read on `to` at every y with y*to inside L(k, from).
class ExpansionPlan {
public:
    ExpansionPlan(const Substitution& s, const PointSet& from, const PointSet& to, int k);

    int steps() const { return k_; }
    std::size_t offsets() const { return ys_.size(); }
    const std::vector<Point>& offset_points() const { return ys_; }

    // full_only: skip windows touching a blank; otherwise skip only all-blank ones
    void apply(const Word& p, bool full_only, std::vector<Word>& out) const;
    // distinct full windows over many sources; each offset only looks at the letters it reads
    std::vector<Word> collect_full(const std::vector<Word>& sources, Exec exec) const;

private:
    const Substitution* s_;
    int k_;
    std::size_t to_size_ = 0, cells_ = 0;
    std::vector<Point> ys_;
    std::vector<std::uint32_t> src_;           // ys_.size() * to_size_ indices i * cells_ + j
    std::vector<std::uint32_t> dep_begin_, dep_;  // source slots each offset reads
    std::vector<Word> tables_;                 // S^k(a) in support_sequence order
};

// Legality over the closure shape R: the partial R-windows of S^n(a) for all n and a
// (cells outside L(n, {e}) blank) form the least set containing the one-letter windows and
// closed under one substitution step. Every legal patch is read off S^k of these.
class Dictionary {
public:
    // UnsupportedError for non-primitive rules
    explicit Dictionary(const Substitution& s, Exec exec = Exec::parallel);

    const Substitution& substitution() const { return *s_; }
    const PointSet& shape() const { return shape_; }
    // sorted partial windows
    const std::vector<Word>& closure() const { return closure_; }
    // full windows, plus partial ones no full window extends
    const std::vector<Word>& sources() const { return sources_; }

    // least k with every x*t inside some D^k(g) L(k, R)
    int steps_for(const PointSet& t) const;
    // W(S)_t; cached per shape
    const WordSet& legal(const PointSet& t) const;
    bool is_legal(const PointSet& t, const Word& w) const { return legal(t).count(w) != 0; }

private:
    std::shared_ptr<const Substitution> s_;
    Exec exec_;
    PointSet shape_;
    std::vector<Word> closure_, sources_;
    mutable std::mutex mu_;
    mutable std::map<std::vector<Point>, std::shared_ptr<const WordSet>> cache_;
};

// All t-windows of S^n(a), all letters, n = 0..n_max. Stops early once two consecutive
// levels add nothing; *saturated gets the level where the union stopped growing.
WordSet oracle_dictionary(const Substitution& s, const PointSet& t, int n_max, int* saturated = nullptr);

// Z^d box windows. Cells in lexicographic order, last axis fastest.
struct Canvas {
    std::vector<std::int64_t> dims;
    Word cells;
};
struct NameGrid {
    std::vector<std::int64_t> dims;
    std::vector<std::int32_t> names;  // -1 when the window touches a blank
};
// Name of every side-w window, by repeated doubling along each axis and one overlapping
// pair to reach w. Two windows in one call get the same name iff their contents are equal.
std::vector<NameGrid> box_names(const std::vector<const Canvas*>& canvases, const std::vector<std::int64_t>& w);

// side lengths of the box B(e, r) on Z^d
std::vector<std::int64_t> ball_box(const LatticeModel& m, Rational r);
// least K with every side-w box inside some D^K(g) L(K, {0,1}^d)
int canvas_level(const LatticeModel& m, const std::vector<std::int64_t>& w);
// S^K(P) for every source P, laid out densely over L(K, {0,1}^d)
std::vector<Canvas> legal_canvases(const Dictionary& d, int k);
// one period of a Z^d periodic config, extended by w - 1 along each axis
Canvas periodic_canvas(const LatticeModel& m, const PeriodicConfig& w, const std::vector<std::int64_t>& side);

// |W(S)_{B(e, r)}|
std::size_t patch_count(const Dictionary& d, Rational r);
// max(1, max over r <= r_max of (R_min(r) - 1) / r), R_min(r) the least integer radius whose every
// legal ball patch contains every legal r-ball patch. C_LR is strictly larger than each ratio.
Rational lin_rep_lower_bound(const Dictionary& d, int r_max, int big_r_max = 64);
// same through explicit words; any lattice, small radii only
Rational lin_rep_lower_bound_generic(const Dictionary& d, int r_max, int big_r_max = 32);

}  // namespace aperiodiq
