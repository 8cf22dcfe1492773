#include "aperiodiq/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <map>
#include <sstream>

#include "json.hpp"

namespace aperiodiq {

SubstitutionGraph::SubstitutionGraph(const Dictionary& d, PointSet t, int n, Exec exec)
    : d_(&d), t_(std::move(t)), n_(n), exec_(exec), plan_(d.substitution(), t_, t_, n) {
    if (n < 1) throw InputError("graph step must be positive");
}

BigInt SubstitutionGraph::vertex_count() const {
    BigInt c = 1;
    for (std::size_t i = 0; i < t_.size(); ++i) c *= d_->substitution().letters();
    return c;
}

std::vector<Word> SubstitutionGraph::children(const Word& w) const {
    std::vector<Word> out;
    plan_.apply(w, true, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

const std::vector<Word>& SubstitutionGraph::successors(const Word& w) const {
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = memo_.find(w);
        if (it != memo_.end()) return it->second;
    }
    std::vector<Word> next;
    if (!legal(w))
        for (auto& c : children(w))
            if (!legal(c)) next.push_back(c);
    std::lock_guard<std::mutex> lock(mu_);
    return memo_.emplace(w, std::move(next)).first->second;
}

std::size_t MaterializedGraph::index(const Word& w) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), w);
    if (it == vertices.end() || *it != w) throw InputError("word is not a vertex");
    return static_cast<std::size_t>(it - vertices.begin());
}

MaterializedGraph build_graph(const SubstitutionGraph& g) {
    BigInt count = g.vertex_count();
    if (count > BigInt(point_cap()))
        throw ResourceError("graph has " + count.str() + " vertices, above the point cap of " +
                            std::to_string(point_cap()));
    const std::size_t n = static_cast<std::size_t>(count);
    const std::size_t k = g.dictionary().substitution().letters();
    const std::size_t len = g.shape().size();
    MaterializedGraph mg;
    mg.vertices.reserve(n);
    Word w(len, 0);
    for (std::size_t v = 0; v < n; ++v) {
        mg.vertices.push_back(w);
        for (std::size_t i = len; i-- > 0;) {
            if (++w[i] < k) break;
            w[i] = 0;
        }
    }
    mg.legal.resize(n);
    mg.edges.resize(n);
    for (std::size_t v = 0; v < n; ++v) mg.legal[v] = g.legal(mg.vertices[v]);
    for_each_index(n, g.exec(), [&](std::size_t v) {
        for (auto& u : g.successors(mg.vertices[v])) mg.edges[v].push_back(static_cast<std::uint32_t>(mg.index(u)));
    });
    return mg;
}

namespace {

std::vector<Word> sorted(const WordSet& s) {
    std::vector<Word> v(s.begin(), s.end());
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

ConvergenceCertificate certify(const SubstitutionGraph& g, const WordSet& start) {
    ConvergenceCertificate c;
    c.n0_bound = g.vertex_count() * g.step();
    c.start_windows = start.size();
    std::vector<Word> roots;
    for (auto& w : sorted(start))
        if (!g.legal(w)) roots.push_back(w);
    c.start_illegal = roots.size();

    enum : char { white = 0, grey = 1, black = 2 };
    std::unordered_map<Word, char, WordHash> color;
    std::unordered_map<Word, int, WordHash> depth;  // illegal vertices on the longest path out
    struct Frame {
        Word v;
        std::size_t next = 0;
    };
    for (auto& root : roots) {
        if (color[root] == black) continue;
        std::vector<Frame> stack{{root, 0}};
        color[root] = grey;
        while (!stack.empty()) {
            const std::size_t top = stack.size() - 1;
            const auto& succ = g.successors(stack[top].v);
            if (stack[top].next < succ.size()) {
                const Word& u = succ[stack[top].next++];
                char& cu = color[u];
                if (cu == grey) {
                    c.verdict = Verdict::diverges;
                    for (auto& f : stack) c.path.push_back(f.v);
                    c.cycle_from = static_cast<std::size_t>(
                        std::find(c.path.begin(), c.path.end(), u) - c.path.begin());
                    c.path.push_back(u);
                    c.explored = color.size();
                    return c;
                }
                if (cu == white) {
                    cu = grey;
                    stack.push_back({u, 0});
                }
            } else {
                int best = 0;
                for (auto& u : succ) best = std::max(best, depth[u]);
                depth[stack[top].v] = best + 1;
                color[stack[top].v] = black;
                stack.pop_back();
            }
        }
    }
    c.verdict = Verdict::converges;
    for (auto& r : roots) c.longest = std::max(c.longest, depth[r]);
    c.n0_measured = c.longest * g.step();
    c.explored = color.size();
    return c;
}

ConvergenceCertificate certify(const SubstitutionGraph& g, const PeriodicConfig& w0) {
    return certify(g, window_patches(g.dictionary().substitution().model(), w0, g.shape()));
}

std::optional<std::size_t> condition_iv(const SubstitutionGraph& g, const WordSet& start) {
    std::unordered_map<Word, std::size_t, WordHash> id;
    std::vector<Word> verts;
    std::deque<std::size_t> queue;
    std::vector<std::size_t> roots;
    for (auto& w : sorted(start)) {
        if (g.legal(w)) continue;
        auto [it, ins] = id.emplace(w, verts.size());
        if (ins) {
            verts.push_back(w);
            queue.push_back(it->second);
        }
        roots.push_back(it->second);
    }
    std::vector<std::vector<std::size_t>> adj;
    while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.pop_front();
        if (adj.size() <= v) adj.resize(v + 1);
        for (auto& u : g.successors(verts[v])) {
            auto [it, ins] = id.emplace(u, verts.size());
            if (ins) {
                verts.push_back(u);
                queue.push_back(it->second);
            }
            adj[v].push_back(it->second);
        }
    }
    adj.resize(verts.size());
    std::vector<std::size_t> indeg(verts.size(), 0), order;
    for (auto& a : adj)
        for (auto u : a) ++indeg[u];
    for (std::size_t v = 0; v < verts.size(); ++v)
        if (indeg[v] == 0) order.push_back(v);
    for (std::size_t i = 0; i < order.size(); ++i)
        for (auto u : adj[order[i]])
            if (--indeg[u] == 0) order.push_back(u);
    if (order.size() != verts.size()) return std::nullopt;
    std::vector<std::size_t> len(verts.size(), 0);
    for (std::size_t i = order.size(); i-- > 0;) {
        std::size_t v = order[i];
        for (auto u : adj[v]) len[v] = std::max(len[v], len[u] + 1);
    }
    std::size_t best = 0;
    for (auto r : roots) best = std::max(best, len[r]);
    return best;
}

WordSet step_windows(const SubstitutionGraph& g, const WordSet& windows) {
    auto in = sorted(windows);
    std::vector<std::vector<Word>> parts(in.size());
    for_each_index(in.size(), g.exec(), [&](std::size_t i) { parts[i] = g.children(in[i]); });
    WordSet out;
    for (auto& p : parts) out.insert(p.begin(), p.end());
    return out;
}

bool recheck(const SubstitutionGraph& g, const WordSet& start, const BigInt& n) {
    if (n < 0 || n % g.step() != 0) throw InputError("recheck depth must be a nonnegative multiple of the step");
    const BigInt steps = n / g.step();
    std::map<std::vector<Word>, std::size_t> seen;
    std::vector<WordSet> states;
    WordSet cur = start;
    for (std::size_t k = 0; BigInt(k) < steps; ++k) {
        auto key = sorted(cur);
        auto it = seen.find(key);
        if (it != seen.end()) {
            const std::size_t j = it->second, period = k - j;
            cur = states[j + static_cast<std::size_t>((steps - j) % period)];
            break;
        }
        seen.emplace(std::move(key), k);
        states.push_back(cur);
        cur = step_windows(g, cur);
    }
    for (auto& w : cur)
        if (!g.legal(w)) return false;
    return true;
}

bool previous_step_holds(const SubstitutionGraph& g, const PeriodicConfig& w) {
    const auto& s = g.dictionary().substitution();
    const auto& m = s.model();
    auto before = window_patches(m, w, g.shape());
    auto after = window_patches(m, substitute_periodic(s, w, g.step()), g.shape());
    std::vector<std::vector<Word>> kids;
    for (auto& p : sorted(before))
        if (!g.legal(p)) kids.push_back(g.children(p));
    for (auto& q : after) {
        if (g.legal(q)) continue;
        bool found = false;
        for (auto& k : kids)
            if (std::binary_search(k.begin(), k.end(), q)) {
                found = true;
                break;
            }
        if (!found) return false;
    }
    return true;
}

std::string certificate_json(const SubstitutionGraph& g, const ConvergenceCertificate& c) {
    const auto& s = g.dictionary().substitution();
    nlohmann::json j;
    j["format"] = 1;
    j["verdict"] = c.verdict == Verdict::converges ? "converges" : "diverges";
    nlohmann::json shape = nlohmann::json::array();
    for (auto& p : g.shape()) {
        nlohmann::json q = nlohmann::json::array();
        for (int i = 0; i < s.model().dim(); ++i) q.push_back(p[i]);
        shape.push_back(q);
    }
    j["shape"] = shape;
    j["step"] = g.step();
    j["vertices"] = g.vertex_count().str();
    j["start_windows"] = c.start_windows;
    j["start_illegal"] = c.start_illegal;
    j["explored"] = c.explored;
    if (c.verdict == Verdict::converges) {
        j["n0_bound"] = c.n0_bound.str();
        j["longest_illegal_path"] = c.longest;
        j["n0_measured"] = c.n0_measured;
    } else {
        nlohmann::json path = nlohmann::json::array();
        for (auto& w : c.path) path.push_back(render_word(s.alphabet(), w));
        j["path"] = path;
        j["cycle_from"] = c.cycle_from;
    }
    return j.dump(2);
}

DeltaResult measure_delta(const Dictionary& d, const PeriodicConfig& w0, int n, std::int64_t r_max) {
    const auto& s = d.substitution();
    const auto& m = s.model();
    if (m.kind() != LatticeKind::Zd) return measure_delta_generic(d, w0, n, r_max);
    if (r_max < 1) throw InputError("r_max must be positive");
    auto cfg = substitute_periodic(s, w0, n);
    std::map<int, std::vector<Canvas>> canvases;
    auto agree = [&](std::int64_t r) {
        auto w = ball_box(m, Rational(r));
        int k = canvas_level(m, w);
        auto it = canvases.find(k);
        if (it == canvases.end()) it = canvases.emplace(k, legal_canvases(d, k)).first;
        Canvas pc = periodic_canvas(m, cfg, w);
        std::vector<const Canvas*> ptrs;
        for (auto& c : it->second) ptrs.push_back(&c);
        ptrs.push_back(&pc);
        auto grids = box_names(ptrs, w);
        std::unordered_set<std::int32_t> legal, seen;
        for (std::size_t i = 0; i + 1 < grids.size(); ++i)
            for (auto v : grids[i].names)
                if (v >= 0) legal.insert(v);
        for (auto v : grids.back().names) seen.insert(v);
        return legal == seen;
    };
    DeltaResult res;
    res.n = n;
    // gallop upwards first so large canvases are only built when needed
    std::int64_t lo = 0, hi = 1;
    while (hi <= r_max && agree(hi)) {
        lo = hi;
        hi = hi == r_max ? r_max + 1 : std::min(2 * hi, r_max);
    }
    if (lo == r_max) {
        res.saturated = true;
    } else {
        while (hi - lo > 1) {
            std::int64_t mid = lo + (hi - lo) / 2;
            (agree(mid) ? lo : hi) = mid;
        }
    }
    res.r_star = lo;
    res.delta = Rational(1, res.r_star + 1);
    return res;
}

DeltaResult measure_delta_generic(const Dictionary& d, const PeriodicConfig& w0, int n, std::int64_t r_max) {
    const auto& s = d.substitution();
    const auto& m = s.model();
    auto cfg = substitute_periodic(s, w0, n);
    DeltaResult res;
    res.n = n;
    res.saturated = true;
    for (std::int64_t r = 1; r <= r_max; ++r) {
        auto ball = m.ball_points(m.identity(), Rational(r));
        if (window_patches(m, cfg, ball) != d.legal(ball)) {
            res.saturated = false;
            break;
        }
        res.r_star = r;
    }
    res.delta = Rational(1, res.r_star + 1);
    return res;
}

RateConstants rate_constants(const LatticeModel& m, Rational c_lr, int n0) {
    RateConstants k;
    k.c_lr = c_lr;
    k.c_minus = m.c_minus();
    k.s = m.s();
    k.c_t = canonical_domain(m).c_t;
    k.n0 = n0;
    k.lambda0 = m.stretch();
    const double l = m.stretch();
    double a = boost::rational_cast<double>(c_lr / k.c_minus) * std::pow(l, k.s);
    double b = boost::rational_cast<double>(k.c_t) * std::pow(l, n0);
    k.c = std::max(a, b);
    k.m1 = std::log(k.c) / std::log(l);
    return k;
}

RateReport rate_report(const Dictionary& d, const PeriodicConfig& w0, int n0, int n_max, std::int64_t r_max,
                       int lin_rep_radius) {
    const auto& m = d.substitution().model();
    RateReport rep;
    rep.lin_rep_radius = lin_rep_radius;
    rep.constants = rate_constants(m, lin_rep_lower_bound(d, lin_rep_radius), n0);
    const double l = m.stretch();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    rep.lower_c = INFINITY;
    for (int n = 1; n <= n_max; ++n) {
        auto dr = measure_delta(d, w0, n, r_max);
        RateRow row{n, dr.r_star, dr.delta, dr.saturated, rep.constants.c / std::pow(l, n)};
        rep.rows.push_back(row);
        double y = std::log(boost::rational_cast<double>(dr.delta));
        rep.lower_c = std::min(rep.lower_c, boost::rational_cast<double>(dr.delta) * std::pow(l, n));
        if (dr.saturated) continue;
        sx += n;
        sy += y;
        sxx += static_cast<double>(n) * n;
        sxy += n * y;
        ++cnt;
    }
    if (cnt >= 2) {
        rep.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        rep.intercept = (sy - rep.slope * sx) / cnt;
    }
    return rep;
}

std::string rate_csv(const RateReport& r) {
    std::ostringstream os;
    os << "n,r_star,delta,C_over_lambda_n\n" << std::setprecision(10);
    for (auto& row : r.rows)
        os << row.n << ',' << row.r_star << ',' << boost::rational_cast<double>(row.delta) << ',' << row.bound << '\n';
    return os.str();
}

std::string rate_json(const RateReport& r) {
    nlohmann::json j;
    j["format"] = 1;
    nlohmann::json rows = nlohmann::json::array();
    for (auto& row : r.rows)
        rows.push_back({{"n", row.n},
                        {"r_star", row.r_star},
                        {"delta", boost::rational_cast<double>(row.delta)},
                        {"saturated", row.saturated},
                        {"C_over_lambda_n", row.bound}});
    j["rows"] = rows;
    auto q = [](Rational x) { return std::to_string(x.numerator()) + "/" + std::to_string(x.denominator()); };
    j["C_LR_lower"] = q(r.constants.c_lr);
    j["C_LR_radius"] = r.lin_rep_radius;
    j["C_minus"] = q(r.constants.c_minus);
    j["C_T"] = q(r.constants.c_t);
    j["s"] = r.constants.s;
    j["n0"] = r.constants.n0;
    j["lambda0"] = r.constants.lambda0;
    j["C"] = r.constants.c;
    j["M1"] = r.constants.m1;
    j["note"] = "constant uses a lower bound on C_LR";
    j["slope"] = r.slope;
    j["intercept"] = r.intercept;
    j["lower_c"] = r.lower_c;
    return j.dump(2);
}

}  // namespace aperiodiq
