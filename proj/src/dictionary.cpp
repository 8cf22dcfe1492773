#include "aperiodiq/dictionary.hpp"

#include <algorithm>
#include <unordered_map>

namespace aperiodiq {

PointSet closure_shape(const LatticeModel& m) {
    if (m.kind() == LatticeKind::Heisenberg) return box_shape(m, {{0, 2}, {0, 2}, {0, 2}});
    return base_shape(m);
}

ExpansionPlan::ExpansionPlan(const Substitution& s, const PointSet& from, const PointSet& to, int k)
    : s_(&s), k_(k), to_size_(to.size()) {
    if (k < 1) throw InputError("expansion needs at least one step");
    if (from.empty() || to.empty()) throw InputError("expansion shapes must be nonempty");
    const auto& m = s.model();
    cells_ = static_cast<std::size_t>(checked_pow(static_cast<std::int64_t>(m.seed_cells().size()), k));
    if (static_cast<long double>(cells_) * from.size() > static_cast<long double>(point_cap()))
        throw ResourceError("expansion support exceeds the point cap");
    for (Letter a = 0; a < s.letters(); ++a) tables_.push_back(s.expand(Word(1, a), k));

    auto seq = m.support_sequence(k, from.points());
    std::unordered_map<Point, std::uint32_t, PointHash> where;
    where.reserve(seq.size() * 2);
    for (std::size_t i = 0; i < seq.size(); ++i) where.emplace(seq[i], static_cast<std::uint32_t>(i));

    // y * to[0] must land on the support, so y = q * to[0]^-1
    const Point t0inv = m.inverse(to[0]);
    std::vector<Point> cand;
    cand.reserve(seq.size());
    for (auto& q : seq) cand.push_back(m.multiply(q, t0inv));
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    std::vector<std::uint32_t> row(to_size_);
    dep_begin_.push_back(0);
    for (auto& y : cand) {
        bool inside = true;
        for (std::size_t t = 0; t < to_size_ && inside; ++t) {
            auto it = where.find(m.multiply(y, to[t]));
            if (it == where.end()) inside = false;
            else row[t] = it->second;
        }
        if (!inside) continue;
        ys_.push_back(y);
        src_.insert(src_.end(), row.begin(), row.end());
        std::vector<std::uint32_t> deps;
        for (auto idx : row) deps.push_back(static_cast<std::uint32_t>(idx / cells_));
        std::sort(deps.begin(), deps.end());
        deps.erase(std::unique(deps.begin(), deps.end()), deps.end());
        dep_.insert(dep_.end(), deps.begin(), deps.end());
        dep_begin_.push_back(static_cast<std::uint32_t>(dep_.size()));
    }
}

void ExpansionPlan::apply(const Word& p, bool full_only, std::vector<Word>& out) const {
    Word w(to_size_, kBlank);
    for (std::size_t o = 0; o < ys_.size(); ++o) {
        bool any = false, blank = false;
        for (auto d = dep_begin_[o]; d < dep_begin_[o + 1]; ++d) {
            if (p[dep_[d]] == kBlank) blank = true;
            else any = true;
        }
        if (full_only ? blank : !any) continue;
        const std::uint32_t* row = src_.data() + o * to_size_;
        for (std::size_t t = 0; t < to_size_; ++t) {
            Letter a = p[row[t] / cells_];
            w[t] = a == kBlank ? kBlank : tables_[a][row[t] % cells_];
        }
        out.push_back(w);
    }
}

std::vector<Word> ExpansionPlan::collect_full(const std::vector<Word>& sources, Exec exec) const {
    std::vector<std::vector<Word>> parts(ys_.size());
    for_each_index(ys_.size(), exec, [&](std::size_t o) {
        const auto b = dep_begin_[o], e = dep_begin_[o + 1];
        WordSet keys;
        Word key(e - b, 0);
        for (auto& p : sources) {
            bool blank = false;
            for (auto d = b; d < e; ++d) {
                key[d - b] = p[dep_[d]];
                blank |= key[d - b] == kBlank;
            }
            if (!blank) keys.insert(key);
        }
        // one representative source per key is enough: the window only reads these slots
        Word p(dep_.empty() ? 0 : sources.front().size(), kBlank);
        Word w(to_size_, 0);
        const std::uint32_t* row = src_.data() + o * to_size_;
        for (auto& k : keys) {
            for (auto d = b; d < e; ++d) p[dep_[d]] = k[d - b];
            for (std::size_t t = 0; t < to_size_; ++t) w[t] = tables_[p[row[t] / cells_]][row[t] % cells_];
            parts[o].push_back(w);
        }
    });
    WordSet all;
    for (auto& v : parts) all.insert(v.begin(), v.end());
    std::vector<Word> out(all.begin(), all.end());
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Apply `plan` to every word, in parallel if asked; merged in input order.
std::vector<Word> apply_all(const ExpansionPlan& plan, const std::vector<Word>& in, bool full_only, Exec exec) {
    std::vector<std::vector<Word>> parts(in.size());
    for_each_index(in.size(), exec, [&](std::size_t i) {
        plan.apply(in[i], full_only, parts[i]);
        // drop local duplicates early
        WordSet u(parts[i].begin(), parts[i].end());
        parts[i].assign(u.begin(), u.end());
    });
    std::vector<Word> out;
    for (auto& p : parts) out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
    return out;
}

bool extends(const Word& full, const Word& part) {
    for (std::size_t i = 0; i < part.size(); ++i)
        if (part[i] != kBlank && part[i] != full[i]) return false;
    return true;
}

}  // namespace

Dictionary::Dictionary(const Substitution& s, Exec exec)
    : s_(std::make_shared<const Substitution>(s)), exec_(exec), shape_(closure_shape(s.model())) {
    if (!s.primitivity_exponent())
        throw UnsupportedError("rule is not primitive; the dictionary stopping rule needs primitivity");
    const auto& m = s_->model();
    if (!cover_check(m, shape_, shape_, 1, exec).ok) throw InternalError("closure shape does not cover itself");
    ExpansionPlan plan(*s_, shape_, shape_, 1);

    WordSet seen;
    std::vector<Word> frontier;
    for (Letter a = 0; a < s_->letters(); ++a)
        for (std::size_t r = 0; r < shape_.size(); ++r) {
            Word w(shape_.size(), kBlank);
            w[r] = a;
            if (seen.insert(w).second) frontier.push_back(w);
        }
    while (!frontier.empty()) {
        std::vector<Word> next;
        for (auto& w : apply_all(plan, frontier, false, exec))
            if (seen.insert(w).second) next.push_back(std::move(w));
        frontier.swap(next);
    }
    closure_.assign(seen.begin(), seen.end());
    std::sort(closure_.begin(), closure_.end());

    std::vector<Word> full, partial;
    for (auto& w : closure_) (w.find(kBlank) == Word::npos ? full : partial).push_back(w);
    sources_ = full;
    for (auto& p : partial)
        if (std::none_of(full.begin(), full.end(), [&](const Word& f) { return extends(f, p); })) sources_.push_back(p);
    std::sort(sources_.begin(), sources_.end());
}

int Dictionary::steps_for(const PointSet& t) const {
    if (t.empty()) throw InputError("shape must be nonempty");
    const auto& m = s_->model();
    long double cells = 1;
    for (int k = 1; k <= 12; ++k) {
        cells *= static_cast<long double>(m.seed_cells().size());
        if (cells * t.size() > static_cast<long double>(point_cap()))
            throw ResourceError("shape too large for the dictionary expansion");
        if (cover_check(m, t, shape_, k, exec_).ok) return k;
    }
    throw NoResultError("no expansion depth covers the shape");
}

const WordSet& Dictionary::legal(const PointSet& t) const {
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(t.points());
        if (it != cache_.end()) return *it->second;
    }
    int k = steps_for(t);
    ExpansionPlan plan(*s_, shape_, t, k);
    auto words = plan.collect_full(sources_, exec_);
    auto set = std::make_shared<WordSet>(words.begin(), words.end());
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, ins] = cache_.emplace(t.points(), std::move(set));
    return *it->second;
}

WordSet oracle_dictionary(const Substitution& s, const PointSet& t, int n_max, int* saturated) {
    WordSet out;
    int last_growth = 0, quiet = 0;
    for (int n = 0; n <= n_max; ++n) {
        std::size_t before = out.size();
        for (Letter a = 0; a < s.letters(); ++a)
            for (auto& w : all_windows(s.model(), s.iterate_letter(a, n), t)) out.insert(w);
        if (out.size() != before) {
            last_growth = n;
            quiet = 0;
        } else if (!out.empty() && ++quiet == 2) {
            break;
        }
    }
    if (saturated) *saturated = last_growth;
    return out;
}

std::vector<NameGrid> box_names(const std::vector<const Canvas*>& canvases, const std::vector<std::int64_t>& w) {
    const std::size_t d = w.size();
    std::vector<NameGrid> grids;
    for (auto* c : canvases) {
        if (c->dims.size() != d) throw InputError("canvas dimension does not match the window");
        NameGrid g{c->dims, {}};
        g.names.reserve(c->cells.size());
        for (auto v : c->cells) g.names.push_back(v == kBlank ? -1 : static_cast<std::int32_t>(v));
        for (std::size_t j = 0; j < d; ++j)
            if (g.dims[j] < w[j]) {
                g.dims.assign(d, 0);
                g.names.clear();
            }
        grids.push_back(std::move(g));
    }
    std::unordered_map<std::uint64_t, std::int32_t> ids;
    auto combine = [&](std::size_t axis, std::int64_t shift) {
        ids.clear();
        for (auto& g : grids) {
            if (g.names.empty()) continue;
            std::int64_t outer = 1, inner = 1;
            for (std::size_t j = 0; j < axis; ++j) outer *= g.dims[j];
            for (std::size_t j = axis + 1; j < d; ++j) inner *= g.dims[j];
            const std::int64_t len = g.dims[axis], nlen = len - shift;
            std::vector<std::int32_t> nv(static_cast<std::size_t>(outer * nlen * inner));
            for (std::int64_t o = 0; o < outer; ++o)
                for (std::int64_t a = 0; a < nlen; ++a)
                    for (std::int64_t i = 0; i < inner; ++i) {
                        auto x = g.names[static_cast<std::size_t>((o * len + a) * inner + i)];
                        auto y = g.names[static_cast<std::size_t>((o * len + a + shift) * inner + i)];
                        std::int32_t id = -1;
                        if (x >= 0 && y >= 0) {
                            auto key = (static_cast<std::uint64_t>(x) << 32) | static_cast<std::uint32_t>(y);
                            id = ids.emplace(key, static_cast<std::int32_t>(ids.size())).first->second;
                        }
                        nv[static_cast<std::size_t>((o * nlen + a) * inner + i)] = id;
                    }
            g.names.swap(nv);
            g.dims[axis] = nlen;
        }
    };
    for (std::size_t j = 0; j < d; ++j) {
        if (w[j] < 1) throw InputError("window sides must be positive");
        std::int64_t s = 1;
        while (2 * s <= w[j]) {
            combine(j, s);
            s *= 2;
        }
        if (s < w[j]) combine(j, w[j] - s);
    }
    return grids;
}

std::vector<std::int64_t> ball_box(const LatticeModel& m, Rational r) {
    if (m.kind() != LatticeKind::Zd) throw UnsupportedError("box windows need a Z^d lattice");
    std::vector<std::int64_t> side;
    for (int j = 0; j < m.dim(); ++j) {
        std::int64_t h = 0;
        while (true) {
            Point p;
            p[j] = h + 1;
            if (!m.distance_lt(m.identity(), p, r)) break;
            ++h;
        }
        side.push_back(2 * h + 1);
    }
    return side;
}

int canvas_level(const LatticeModel& m, const std::vector<std::int64_t>& w) {
    for (int k = 1; k <= 40; ++k) {
        bool ok = true;
        for (int j = 0; j < m.dim(); ++j)
            if (checked_pow(m.scales()[static_cast<std::size_t>(j)], k) + 1 < w[static_cast<std::size_t>(j)]) ok = false;
        if (ok) return k;
    }
    throw ResourceError("window too large");
}

std::vector<Canvas> legal_canvases(const Dictionary& d, int k) {
    const auto& s = d.substitution();
    const auto& m = s.model();
    if (m.kind() != LatticeKind::Zd) throw UnsupportedError("canvases need a Z^d lattice");
    const auto& base = d.shape();
    auto seq = m.support_sequence(k, base.points());
    if (static_cast<long double>(seq.size()) * d.sources().size() > static_cast<long double>(point_cap()))
        throw ResourceError("legal canvases exceed the point cap");
    const std::size_t cells = seq.size() / base.size();
    std::vector<Word> tables;
    for (Letter a = 0; a < s.letters(); ++a) tables.push_back(s.expand(Word(1, a), k));

    const int dim = m.dim();
    std::vector<std::int64_t> lo(static_cast<std::size_t>(dim), INT64_MAX), hi(static_cast<std::size_t>(dim), INT64_MIN);
    for (auto& p : seq)
        for (int j = 0; j < dim; ++j) {
            lo[static_cast<std::size_t>(j)] = std::min(lo[static_cast<std::size_t>(j)], p[j]);
            hi[static_cast<std::size_t>(j)] = std::max(hi[static_cast<std::size_t>(j)], p[j]);
        }
    std::vector<std::int64_t> dims;
    std::size_t total = 1;
    for (int j = 0; j < dim; ++j) {
        dims.push_back(hi[static_cast<std::size_t>(j)] - lo[static_cast<std::size_t>(j)] + 1);
        total *= static_cast<std::size_t>(dims.back());
    }
    std::vector<std::size_t> offset(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
        std::size_t o = 0;
        for (int j = 0; j < dim; ++j)
            o = o * static_cast<std::size_t>(dims[static_cast<std::size_t>(j)]) +
                static_cast<std::size_t>(seq[i][j] - lo[static_cast<std::size_t>(j)]);
        offset[i] = o;
    }
    std::vector<Canvas> out;
    out.reserve(d.sources().size());
    for (auto& p : d.sources()) {
        Canvas c{dims, Word(total, kBlank)};
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] == kBlank) continue;
            const Word& t = tables[p[i]];
            for (std::size_t j = 0; j < cells; ++j) c.cells[offset[i * cells + j]] = t[j];
        }
        out.push_back(std::move(c));
    }
    return out;
}

Canvas periodic_canvas(const LatticeModel& m, const PeriodicConfig& w, const std::vector<std::int64_t>& side) {
    if (m.kind() != LatticeKind::Zd) throw UnsupportedError("canvases need a Z^d lattice");
    const std::size_t dim = static_cast<std::size_t>(m.dim());
    std::vector<std::int64_t> period(dim, 1);
    if (w.kind() == PeriodicConfig::Kind::Zd) period = w.period();
    else if (w.kind() != PeriodicConfig::Kind::Constant) throw InputError("expected a Z^d periodic config");
    Canvas c;
    long double total = 1;
    for (std::size_t j = 0; j < dim; ++j) {
        c.dims.push_back(period[j] + side[j] - 1);
        total *= static_cast<long double>(c.dims.back());
    }
    if (total > static_cast<long double>(point_cap())) throw ResourceError("periodic canvas exceeds the point cap");
    c.cells.resize(static_cast<std::size_t>(total));
    Point p;
    for (std::size_t i = 0; i < c.cells.size(); ++i) {
        c.cells[i] = w.at(m, p);
        for (int j = static_cast<int>(dim) - 1; j >= 0; --j) {
            if (++p[j] < c.dims[static_cast<std::size_t>(j)]) break;
            p[j] = 0;
        }
    }
    return c;
}

namespace {

std::vector<const Canvas*> pointers(const std::vector<Canvas>& cs) {
    std::vector<const Canvas*> out;
    for (auto& c : cs) out.push_back(&c);
    return out;
}

std::unordered_set<std::int32_t> valid_names(const std::vector<NameGrid>& grids) {
    std::unordered_set<std::int32_t> out;
    for (auto& g : grids)
        for (auto v : g.names)
            if (v >= 0) out.insert(v);
    return out;
}

}  // namespace

std::size_t patch_count(const Dictionary& d, Rational r) {
    const auto& m = d.substitution().model();
    if (m.kind() != LatticeKind::Zd) return d.legal(m.ball_points(m.identity(), r)).size();
    auto w = ball_box(m, r);
    auto cs = legal_canvases(d, canvas_level(m, w));
    return valid_names(box_names(pointers(cs), w)).size();
}

namespace {

// does every legal side-W window contain every legal side-w window?
bool contains_all(const std::vector<Canvas>& cs, const std::vector<std::int64_t>& w, const std::vector<std::int64_t>& big) {
    auto ptrs = pointers(cs);
    auto small = box_names(ptrs, w);
    auto large = box_names(ptrs, big);
    const std::size_t need = valid_names(small).size();
    const std::size_t dim = w.size();
    std::vector<std::int64_t> span(dim);
    for (std::size_t j = 0; j < dim; ++j) span[j] = big[j] - w[j] + 1;
    std::unordered_set<std::int32_t> done;
    for (std::size_t c = 0; c < cs.size(); ++c) {
        const auto& L = large[c];
        const auto& S = small[c];
        std::vector<std::int64_t> x(dim, 0);
        for (std::size_t li = 0; li < L.names.size(); ++li) {
            if (li) {
                for (int j = static_cast<int>(dim) - 1; j >= 0; --j) {
                    if (++x[static_cast<std::size_t>(j)] < L.dims[static_cast<std::size_t>(j)]) break;
                    x[static_cast<std::size_t>(j)] = 0;
                }
            }
            auto name = L.names[li];
            if (name < 0 || !done.insert(name).second) continue;
            std::unordered_set<std::int32_t> inside;
            std::vector<std::int64_t> o(dim, 0);
            while (true) {
                std::size_t si = 0;
                for (std::size_t j = 0; j < dim; ++j) si = si * static_cast<std::size_t>(S.dims[j]) + static_cast<std::size_t>(x[j] + o[j]);
                inside.insert(S.names[si]);
                int j = static_cast<int>(dim) - 1;
                for (; j >= 0; --j) {
                    if (++o[static_cast<std::size_t>(j)] < span[static_cast<std::size_t>(j)]) break;
                    o[static_cast<std::size_t>(j)] = 0;
                }
                if (j < 0) break;
            }
            if (inside.size() < need) return false;
        }
    }
    return true;
}

Rational finish(Rational worst) { return worst < Rational(1) ? Rational(1) : worst; }

}  // namespace

Rational lin_rep_lower_bound(const Dictionary& d, int r_max, int big_r_max) {
    const auto& m = d.substitution().model();
    if (m.kind() != LatticeKind::Zd) return lin_rep_lower_bound_generic(d, r_max, big_r_max);
    std::map<int, std::vector<Canvas>> canvases;
    auto at_level = [&](int k) -> const std::vector<Canvas>& {
        auto it = canvases.find(k);
        if (it == canvases.end()) it = canvases.emplace(k, legal_canvases(d, k)).first;
        return it->second;
    };
    Rational worst(0);
    for (int r = 1; r <= r_max; ++r) {
        auto w = ball_box(m, Rational(r));
        int big = r;
        for (;; ++big) {
            if (big > big_r_max) throw NoResultError("no radius up to the limit contains every legal patch");
            auto bw = ball_box(m, Rational(big));
            if (contains_all(at_level(canvas_level(m, bw)), w, bw)) break;
        }
        worst = std::max(worst, Rational(big - 1, r));
    }
    return finish(worst);
}

Rational lin_rep_lower_bound_generic(const Dictionary& d, int r_max, int big_r_max) {
    const auto& m = d.substitution().model();
    Rational worst(0);
    for (int r = 1; r <= r_max; ++r) {
        auto small = m.ball_points(m.identity(), Rational(r));
        const std::size_t need = d.legal(small).size();
        int big = r;
        for (;; ++big) {
            if (big > big_r_max) throw NoResultError("no radius up to the limit contains every legal patch");
            auto ball = m.ball_points(m.identity(), Rational(big));
            bool ok = true;
            for (auto& q : d.legal(ball)) {
                if (all_windows(m, Patch(ball, q), small).size() < need) {
                    ok = false;
                    break;
                }
            }
            if (ok) break;
        }
        worst = std::max(worst, Rational(big - 1, r));
    }
    return finish(worst);
}

}  // namespace aperiodiq
