#include "doctest.h"

#include <random>

#include "aperiodiq/catalog.hpp"
#include "aperiodiq/dictionary.hpp"

using namespace aperiodiq;

namespace {

Word all_of(std::size_t n, Letter a) { return Word(n, a); }

// every word over the alphabet on |t| cells
std::vector<Word> every_word(std::size_t letters, std::size_t cells) {
    std::vector<Word> out;
    Word w(cells, 0);
    while (true) {
        out.push_back(w);
        std::size_t i = 0;
        while (i < cells && ++w[i] == letters) w[i++] = 0;
        if (i == cells) break;
    }
    return out;
}

}  // namespace

TEST_CASE("closure shapes cover themselves after one step") {
    for (auto m : {LatticeModel::zd({2, 2}), LatticeModel::zd({2}), LatticeModel::zd({3, 2}), LatticeModel::heisenberg()}) {
        auto r = closure_shape(m);
        CHECK(cover_check(m, r, r, 1).ok);
    }
    CHECK(closure_shape(LatticeModel::heisenberg()).size() == 8);
}

TEST_CASE("expansion plan reads windows of S^k(P)") {
    auto f = table_tiling();
    const auto& s = f.sub;
    const auto& m = s.model();
    auto t = base_shape(m);
    std::mt19937 rng(7);
    for (int k = 1; k <= 2; ++k) {
        ExpansionPlan plan(s, t, t, k);
        for (int trial = 0; trial < 20; ++trial) {
            Word p(t.size(), 0);
            for (auto& v : p) v = static_cast<Letter>(rng() % 4);
            std::vector<Word> got;
            plan.apply(p, true, got);
            WordSet a(got.begin(), got.end());
            Patch big(t, p);
            for (int i = 0; i < k; ++i) big = s.substitute(big);
            CHECK(a == all_windows(m, big, t));
        }
    }
}

TEST_CASE("table tiling legal dictionary matches the oracle") {
    auto f = table_tiling();
    Dictionary d(f.sub);
    const auto& m = f.sub.model();
    auto t = base_shape(m);
    int sat = 0;
    auto oracle = oracle_dictionary(f.sub, t, 8, &sat);
    CHECK(sat <= 8);
    auto legal = d.legal(t);
    CHECK(legal == oracle);
    CHECK(legal.size() > 4);
    CHECK(legal.size() < 256);
    for (auto& w : every_word(4, 4)) CHECK(d.is_legal(t, w) == (oracle.count(w) == 1));
    // all-red is illegal, every window of a third iterate is legal
    CHECK_FALSE(d.is_legal(t, all_of(4, 0)));
    for (Letter a = 0; a < 4; ++a)
        for (auto& w : all_windows(m, f.sub.iterate_letter(a, 3), t)) CHECK(d.is_legal(t, w));
    // singletons
    CHECK(d.legal(PointSet({m.identity()})).size() == 4);
}

TEST_CASE("other shapes agree with the oracle") {
    auto f = table_tiling();
    Dictionary d(f.sub);
    const auto& m = f.sub.model();
    std::vector<PointSet> shapes = {
        box_shape(m, {{-1, 1}, {-1, 1}}),
        PointSet({make_point({0, 0}), make_point({2, 0})}),
        PointSet({make_point({0, 0}), make_point({1, 0}), make_point({0, 1})}),
        box_shape(m, {{0, 2}, {0, 0}}),
        PointSet({make_point({-3, 1}), make_point({2, -2})}),
    };
    for (auto& t : shapes) CHECK(d.legal(t) == oracle_dictionary(f.sub, t, 8));

    auto pd = period_doubling();
    Dictionary d1(pd.sub);
    for (std::int64_t w = 1; w <= 6; ++w) {
        auto t = box_shape(pd.sub.model(), {{0, w - 1}});
        CHECK(d1.legal(t) == oracle_dictionary(pd.sub, t, 12));
    }
}

TEST_CASE("legality is closed under substitution") {
    auto f = table_tiling();
    Dictionary d(f.sub);
    const auto& m = f.sub.model();
    for (auto& t : {base_shape(m), box_shape(m, {{-1, 1}, {-1, 1}})}) {
        ExpansionPlan plan(f.sub, t, t, 1);
        for (auto& p : d.legal(t)) {
            std::vector<Word> kids;
            plan.apply(p, true, kids);
            for (auto& q : kids) CHECK(d.is_legal(t, q));
        }
    }
}

TEST_CASE("serial and parallel closures agree") {
    auto f = table_tiling();
    Dictionary a(f.sub, Exec::serial), b(f.sub, Exec::parallel);
    CHECK(a.closure() == b.closure());
    CHECK(a.sources() == b.sources());
    auto t = box_shape(f.sub.model(), {{-1, 1}, {-1, 1}});
    CHECK(a.legal(t) == b.legal(t));
}

TEST_CASE("non-primitive rules are rejected") {
    Alphabet alpha{{"a", "b"}, {0, 1}, {"", ""}};
    Substitution s(LatticeModel::zd({2}), alpha, {Word{0, 0}, Word{1, 1}});
    CHECK_THROWS_AS(Dictionary{s}, UnsupportedError);
}

TEST_CASE("heisenberg dictionary") {
    auto f = heisenberg_example();
    Dictionary d(f.sub);
    const auto& m = f.sub.model();
    auto tp = base_shape(m);
    CHECK(d.is_legal(tp, all_of(tp.size(), 0)));
    CHECK(d.is_legal(tp, all_of(tp.size(), 1)));
    // everything seen in a second iterate is in the dictionary
    auto r = closure_shape(m);
    auto legal = d.legal(r);
    for (Letter a = 0; a < 2; ++a)
        for (auto& w : all_windows(m, f.sub.iterate_letter(a, 2), r)) CHECK(legal.count(w) == 1);
    auto seen = oracle_dictionary(f.sub, tp, 2);
    auto big = d.legal(tp);
    for (auto& w : seen) CHECK(big.count(w) == 1);
}

TEST_CASE("patch counts and linear repetitivity") {
    auto f = table_tiling();
    Dictionary d(f.sub);
    const auto& m = f.sub.model();
    CHECK(patch_count(d, Rational(1)) == 4);
    CHECK(patch_count(d, Rational(1, 2)) == 4);
    CHECK(patch_count(d, Rational(3, 2)) == oracle_dictionary(f.sub, box_shape(m, {{-1, 1}, {-1, 1}}), 8).size());
    std::size_t prev = 0;
    for (int r = 1; r <= 6; ++r) {
        auto c = patch_count(d, Rational(r));
        CHECK(c >= prev);
        prev = c;
        if (r <= 3) CHECK(c == d.legal(m.ball_points(m.identity(), Rational(r))).size());
    }
    auto c = lin_rep_lower_bound(d, 2);
    CHECK(c >= Rational(1));
    CHECK(c == lin_rep_lower_bound_generic(d, 2));

    auto pd = period_doubling();
    Dictionary d1(pd.sub);
    CHECK(lin_rep_lower_bound(d1, 3) == lin_rep_lower_bound_generic(d1, 3));
}

TEST_CASE("box names are exact") {
    Canvas a{{3, 4}, Word{0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 0, 1}};
    Canvas b{{2, 2}, Word{1, 0, 0, 1}};
    Canvas c{{2, 3}, Word{kBlank, 0, 0, 1, 0, 1}};
    auto g = box_names({&a, &b, &c}, {2, 2});
    REQUIRE(g.size() == 3);
    CHECK(g[0].dims == std::vector<std::int64_t>{2, 3});
    // a at (0,1) reads 1 0 / 0 1, same as b
    CHECK(g[0].names[1] == g[1].names[0]);
    CHECK(g[0].names[0] != g[0].names[1]);
    CHECK(g[0].names[0] == g[0].names[2]);
    CHECK(g[2].names[0] == -1);
    CHECK(g[2].names[1] != -1);
}
