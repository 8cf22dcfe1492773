#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "aperiodiq/lattice.hpp"

namespace aperiodiq {

using Letter = std::uint8_t;
constexpr Letter kBlank = 0xFF;
constexpr std::size_t kMaxLetters = 250;

// Letter values over a fixed shape, in the shape's point order. kBlank marks "no value".
using Word = std::basic_string<Letter>;

struct WordHash {
    std::size_t operator()(const Word& w) const noexcept {
        return std::hash<std::string_view>{}(std::string_view(reinterpret_cast<const char*>(w.data()), w.size()));
    }
};
using WordSet = std::unordered_set<Word, WordHash>;

struct Alphabet {
    std::vector<std::string> names;
    std::vector<double> potential;
    std::vector<std::string> color;

    std::size_t size() const { return names.size(); }
    Letter index(const std::string& name) const;
    void validate() const;
    bool operator==(const Alphabet&) const = default;
};

std::string render_word(const Alphabet& alpha, const Word& w);

class Patch {
public:
    Patch() = default;
    // duplicate points are rejected
    explicit Patch(std::vector<std::pair<Point, Letter>> entries);
    Patch(const PointSet& support, const Word& values);

    std::size_t size() const { return pts_.size(); }
    bool empty() const { return pts_.empty(); }
    const std::vector<Point>& points() const { return pts_; }
    const Word& values() const { return vals_; }
    PointSet support() const { return PointSet(pts_); }
    std::optional<Letter> at(const Point& p) const;
    // restriction to x*T re-anchored to T; nullopt if some cell is missing
    std::optional<Word> window(const LatticeModel& m, const Point& x, const PointSet& shape) const;
    Patch translate(const LatticeModel& m, const Point& g) const;
    bool operator==(const Patch&) const = default;

private:
    std::vector<Point> pts_;  // sorted
    Word vals_;
};

class Substitution {
public:
    // table[a][j] is the letter S(a) puts on seed cell j (lexicographic order)
    Substitution(LatticeModel model, Alphabet alphabet, std::vector<Word> table);

    const LatticeModel& model() const { return model_; }
    const Alphabet& alphabet() const { return alpha_; }
    std::size_t letters() const { return alpha_.size(); }
    const Word& image(Letter a) const { return table_[a]; }
    const std::vector<Word>& table() const { return table_; }

    Patch substitute(const Patch& p) const;
    Patch iterate_letter(Letter a, int n) const;
    // S^n of the values on a point list, laid out like support_sequence(n, points)
    Word expand(const Word& values, int n) const;
    void expand_into(const Word& values, int n, Word& out, Word& scratch) const;

    std::optional<int> primitivity_exponent() const;
    bool operator==(const Substitution& o) const {
        return alpha_ == o.alpha_ && table_ == o.table_ && model_.describe() == o.model_.describe();
    }

private:
    LatticeModel model_;
    Alphabet alpha_;
    std::vector<Word> table_;
};

// A periodic element of A^Gamma.
//   constant:  one letter everywhere
//   zd:        Z^d block with period p (values in lexicographic order over prod [0, p_j))
//   dilation:  S^n(base), evaluated through the quotient decomposition
class PeriodicConfig {
public:
    enum class Kind { Constant, Zd, Dilation };

    static PeriodicConfig constant(Letter a);
    static PeriodicConfig zd(std::vector<std::int64_t> period, Word block);

    Kind kind() const { return kind_; }
    Letter letter() const { return letter_; }
    const std::vector<std::int64_t>& period() const { return period_; }
    const Word& block() const { return block_; }
    int level() const { return level_; }

    Letter at(const LatticeModel& m, const Point& g) const;
    // M' with Gamma = Stab * M'; every orbit point is a translate by some element of M'
    std::vector<Point> transversal(const LatticeModel& m) const;
    std::size_t transversal_size(const LatticeModel& m) const;

    friend PeriodicConfig substitute_periodic(const Substitution& s, const PeriodicConfig& w, int n);

private:
    Kind kind_ = Kind::Constant;
    Letter letter_ = 0;
    std::vector<std::int64_t> period_;
    Word block_;
    // dilation kind
    int level_ = 0;
    std::shared_ptr<const PeriodicConfig> base_;
    PointSet cells_;                        // L(level, {e})
    std::shared_ptr<const std::vector<Word>> tables_;  // S^level(a) on cells_, per letter
};

// S^n(w). Z^d blocks come back as Z^d blocks of period m^n p; everything else as a dilation config.
PeriodicConfig substitute_periodic(const Substitution& s, const PeriodicConfig& w, int n);

// { w|_{xT} : x in region }; Patch sources skip x with xT not inside the support
WordSet window_patches(const LatticeModel& m, const Patch& src, const PointSet& shape,
                       const std::vector<Point>& region);
WordSet window_patches(const LatticeModel& m, const PeriodicConfig& src, const PointSet& shape,
                       const std::vector<Point>& region);
// every window of a periodic configuration (region = one transversal)
WordSet window_patches(const LatticeModel& m, const PeriodicConfig& src, const PointSet& shape);
// every full window of a patch
WordSet all_windows(const LatticeModel& m, const Patch& src, const PointSet& shape);

}  // namespace aperiodiq
