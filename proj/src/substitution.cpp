#include "aperiodiq/substitution.hpp"

#include <algorithm>
#include <bitset>
#include <set>

namespace aperiodiq {

Letter Alphabet::index(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<Letter>(i);
    throw InputError("unknown letter '" + name + "'");
}

void Alphabet::validate() const {
    if (names.empty()) throw InputError("alphabet is empty");
    if (names.size() > kMaxLetters) throw InputError("too many letters");
    std::set<std::string> seen(names.begin(), names.end());
    if (seen.size() != names.size()) throw InputError("letter names must be unique");
    if (potential.size() != names.size() || color.size() != names.size())
        throw InputError("alphabet potential/color lists do not match the letters");
}

std::string render_word(const Alphabet& alpha, const Word& w) {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += ' ';
        out += w[i] == kBlank ? std::string("_") : alpha.names.at(w[i]);
    }
    return out;
}

Patch::Patch(std::vector<std::pair<Point, Letter>> entries) {
    std::sort(entries.begin(), entries.end(), [](auto& a, auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i && entries[i].first == entries[i - 1].first) throw InputError("patch has a repeated point");
        pts_.push_back(entries[i].first);
        vals_.push_back(entries[i].second);
    }
}

Patch::Patch(const PointSet& support, const Word& values) : pts_(support.points()), vals_(values) {
    if (values.size() != support.size()) throw InputError("patch values do not match its support");
}

std::optional<Letter> Patch::at(const Point& p) const {
    auto it = std::lower_bound(pts_.begin(), pts_.end(), p);
    if (it == pts_.end() || *it != p) return std::nullopt;
    return vals_[static_cast<std::size_t>(it - pts_.begin())];
}

std::optional<Word> Patch::window(const LatticeModel& m, const Point& x, const PointSet& shape) const {
    Word w;
    w.reserve(shape.size());
    for (auto& t : shape) {
        auto v = at(m.multiply(x, t));
        if (!v || *v == kBlank) return std::nullopt;
        w.push_back(*v);
    }
    return w;
}

Patch Patch::translate(const LatticeModel& m, const Point& g) const {
    std::vector<std::pair<Point, Letter>> e;
    e.reserve(pts_.size());
    for (std::size_t i = 0; i < pts_.size(); ++i) e.push_back({m.multiply(g, pts_[i]), vals_[i]});
    return Patch(std::move(e));
}

Substitution::Substitution(LatticeModel model, Alphabet alphabet, std::vector<Word> table)
    : model_(std::move(model)), alpha_(std::move(alphabet)), table_(std::move(table)) {
    alpha_.validate();
    if (table_.size() != alpha_.size()) throw InputError("rule must give one image per letter");
    for (auto& w : table_) {
        if (w.size() != model_.seed_cells().size())
            throw InputError("rule image has " + std::to_string(w.size()) + " cells, expected " +
                             std::to_string(model_.seed_cells().size()));
        for (auto v : w)
            if (v >= alpha_.size()) throw InputError("rule image uses an undeclared letter");
    }
}

Patch Substitution::substitute(const Patch& p) const {
    const auto& cells = model_.seed_cells();
    std::vector<std::pair<Point, Letter>> e;
    e.reserve(p.size() * cells.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        Point dg = model_.dilate(1, p.points()[i]);
        Letter a = p.values()[i];
        for (std::size_t j = 0; j < cells.size(); ++j)
            e.push_back({model_.multiply(dg, cells[j]), a == kBlank ? kBlank : table_[a][j]});
    }
    return Patch(std::move(e));
}

Patch Substitution::iterate_letter(Letter a, int n) const {
    if (a >= letters()) throw InputError("letter out of range");
    auto pts = model_.support_sequence(n, {model_.identity()});
    Word w = expand(Word(1, a), n);
    std::vector<std::pair<Point, Letter>> e;
    e.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) e.push_back({pts[i], w[i]});
    return Patch(std::move(e));
}

void Substitution::expand_into(const Word& values, int n, Word& out, Word& scratch) const {
    const std::size_t k = model_.seed_cells().size();
    out = values;
    for (int lvl = 0; lvl < n; ++lvl) {
        scratch.resize(out.size() * k);
        for (std::size_t i = 0; i < out.size(); ++i) {
            Letter a = out[i];
            Letter* dst = scratch.data() + i * k;
            if (a == kBlank) {
                std::fill(dst, dst + k, kBlank);
            } else {
                std::copy(table_[a].begin(), table_[a].end(), dst);
            }
        }
        out.swap(scratch);
    }
}

Word Substitution::expand(const Word& values, int n) const {
    long double size = static_cast<long double>(values.size());
    for (int i = 0; i < n; ++i) size *= model_.seed_cells().size();
    if (size > static_cast<long double>(point_cap())) throw ResourceError("expansion exceeds the point cap");
    Word out, scratch;
    expand_into(values, n, out, scratch);
    return out;
}

std::optional<int> Substitution::primitivity_exponent() const {
    const std::size_t k = letters();
    std::vector<std::bitset<256>> one(k), cur(k);
    for (std::size_t a = 0; a < k; ++a)
        for (auto v : table_[a]) one[a].set(v);
    cur = one;
    const std::size_t bound = (k - 1) * (k - 1) + 1;
    for (std::size_t n = 1; n <= bound; ++n) {
        bool full = true;
        for (std::size_t a = 0; a < k; ++a) full &= cur[a].count() == k;
        if (full) return static_cast<int>(n);
        std::vector<std::bitset<256>> next(k);
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b)
                if (cur[a].test(b)) next[a] |= one[b];
        cur.swap(next);
    }
    return std::nullopt;
}

PeriodicConfig PeriodicConfig::constant(Letter a) {
    PeriodicConfig c;
    c.kind_ = Kind::Constant;
    c.letter_ = a;
    return c;
}

PeriodicConfig PeriodicConfig::zd(std::vector<std::int64_t> period, Word block) {
    std::int64_t n = 1;
    for (auto p : period) {
        if (p < 1) throw InputError("periods must be positive");
        n = checked_mul(n, p);
    }
    if (static_cast<std::int64_t>(block.size()) != n)
        throw InputError("seed block has " + std::to_string(block.size()) + " values, period needs " +
                         std::to_string(n));
    PeriodicConfig c;
    c.kind_ = Kind::Zd;
    c.period_ = std::move(period);
    c.block_ = std::move(block);
    return c;
}

Letter PeriodicConfig::at(const LatticeModel& m, const Point& g) const {
    switch (kind_) {
        case Kind::Constant:
            return letter_;
        case Kind::Zd: {
            if (static_cast<int>(period_.size()) != m.dim()) throw InputError("seed dimension does not match the lattice");
            std::int64_t idx = 0;
            for (std::size_t j = 0; j < period_.size(); ++j) {
                std::int64_t u = g[static_cast<int>(j)] % period_[j];
                if (u < 0) u += period_[j];
                idx = idx * period_[j] + u;
            }
            return block_[static_cast<std::size_t>(idx)];
        }
        case Kind::Dilation: {
            auto [eta, kappa] = m.quotient_decompose(level_, g);
            Letter a = base_->at(m, eta);
            return (*tables_)[a][cells_.index_of(kappa)];
        }
    }
    throw InternalError("bad periodic config kind");
}

std::size_t PeriodicConfig::transversal_size(const LatticeModel& m) const {
    switch (kind_) {
        case Kind::Constant:
            return 1;
        case Kind::Zd:
            return block_.size();
        case Kind::Dilation:
            return base_->transversal_size(m) * cells_.size();
    }
    return 0;
}

std::vector<Point> PeriodicConfig::transversal(const LatticeModel& m) const {
    switch (kind_) {
        case Kind::Constant:
            return {m.identity()};
        case Kind::Zd: {
            std::vector<Point> out;
            out.reserve(block_.size());
            Point p;
            const int d = static_cast<int>(period_.size());
            while (true) {
                out.push_back(p);
                int i = d - 1;
                while (i >= 0) {
                    if (++p[i] < period_[static_cast<std::size_t>(i)]) break;
                    p[i] = 0;
                    --i;
                }
                if (i < 0) break;
            }
            return out;
        }
        case Kind::Dilation:
            return m.support_sequence(level_, base_->transversal(m));
    }
    return {};
}

PeriodicConfig substitute_periodic(const Substitution& s, const PeriodicConfig& w, int n) {
    if (n < 0) throw InputError("n must be >= 0");
    if (n == 0) return w;
    const auto& m = s.model();
    std::vector<Word> tables;
    PointSet cells = m.support(n, PointSet({m.identity()}));
    {
        auto order = m.support_sequence(n, {m.identity()});
        for (Letter a = 0; a < s.letters(); ++a) {
            Word seq = s.expand(Word(1, a), n);
            Word t(cells.size(), kBlank);
            for (std::size_t i = 0; i < order.size(); ++i) t[cells.index_of(order[i])] = seq[i];
            tables.push_back(std::move(t));
        }
    }
    if (m.kind() == LatticeKind::Zd) {
        PeriodicConfig base = w;
        if (w.kind() == PeriodicConfig::Kind::Constant)
            base = PeriodicConfig::zd(std::vector<std::int64_t>(static_cast<std::size_t>(m.dim()), 1), Word(1, w.letter()));
        if (base.kind() != PeriodicConfig::Kind::Zd) throw InputError("unexpected seed kind for a Z^d lattice");
        std::vector<std::int64_t> period = base.period();
        long double size = 1;
        for (std::size_t j = 0; j < period.size(); ++j) {
            period[j] = checked_mul(period[j], checked_pow(m.scales()[j], n));
            size *= static_cast<long double>(period[j]);
        }
        if (size > static_cast<long double>(point_cap())) throw ResourceError("period block exceeds the point cap");
        PeriodicConfig tmp = PeriodicConfig::zd(period, Word(static_cast<std::size_t>(size), 0));
        auto pts = tmp.transversal(m);
        Word block(pts.size(), 0);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            auto [eta, kappa] = m.quotient_decompose(n, pts[i]);
            block[i] = tables[base.at(m, eta)][cells.index_of(kappa)];
        }
        return PeriodicConfig::zd(period, std::move(block));
    }
    PeriodicConfig out;
    out.kind_ = PeriodicConfig::Kind::Dilation;
    if (w.kind() == PeriodicConfig::Kind::Dilation) {
        // S^n(S^k(b)) = S^(n+k)(b)
        return substitute_periodic(s, *w.base_, n + w.level_);
    }
    out.level_ = n;
    out.base_ = std::make_shared<const PeriodicConfig>(w);
    out.cells_ = std::move(cells);
    out.tables_ = std::make_shared<const std::vector<Word>>(std::move(tables));
    return out;
}

WordSet window_patches(const LatticeModel& m, const Patch& src, const PointSet& shape,
                       const std::vector<Point>& region) {
    WordSet out;
    for (auto& x : region)
        if (auto w = src.window(m, x, shape)) out.insert(std::move(*w));
    return out;
}

WordSet window_patches(const LatticeModel& m, const PeriodicConfig& src, const PointSet& shape,
                       const std::vector<Point>& region) {
    WordSet out;
    Word w(shape.size(), 0);
    for (auto& x : region) {
        for (std::size_t i = 0; i < shape.size(); ++i) w[i] = src.at(m, m.multiply(x, shape[i]));
        out.insert(w);
    }
    return out;
}

WordSet window_patches(const LatticeModel& m, const PeriodicConfig& src, const PointSet& shape) {
    return window_patches(m, src, shape, src.transversal(m));
}

WordSet all_windows(const LatticeModel& m, const Patch& src, const PointSet& shape) {
    // x*T inside the support forces x = p * t0^-1 for some support point p
    std::vector<Point> region;
    Point t0inv = m.inverse(shape[0]);
    for (auto& p : src.points()) region.push_back(m.multiply(p, t0inv));
    return window_patches(m, src, shape, region);
}

}  // namespace aperiodiq
