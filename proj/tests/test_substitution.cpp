#include "doctest.h"

#include <random>

#include "aperiodiq/catalog.hpp"
#include "aperiodiq/substitution.hpp"

using namespace aperiodiq;

namespace {

Patch random_patch(const LatticeModel& m, std::size_t letters, std::mt19937_64& rng, int n, int span) {
    std::uniform_int_distribution<int> c(-span, span);
    std::uniform_int_distribution<int> l(0, static_cast<int>(letters) - 1);
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i) {
        Point p;
        for (int j = 0; j < m.dim(); ++j) p[j] = c(rng) * m.step();
        pts.push_back(p);
    }
    PointSet s(pts);
    Word w;
    for (std::size_t i = 0; i < s.size(); ++i) w.push_back(static_cast<Letter>(l(rng)));
    return Patch(s, w);
}

// rows from top (largest y) to bottom, x increasing, one char per letter
Patch grid_patch(const Alphabet& a, std::int64_t x0, std::int64_t ytop, std::vector<std::string> rows) {
    std::vector<std::pair<Point, Letter>> e;
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            std::string name;
            switch (rows[r][c]) {
                case 'L': name = "red"; break;
                case 'R': name = "blue"; break;
                case 'U': name = "yellow"; break;
                case 'D': name = "gray"; break;
            }
            e.push_back({make_point({x0 + static_cast<std::int64_t>(c), ytop - static_cast<std::int64_t>(r)}),
                         a.index(name)});
        }
    return Patch(e);
}

}  // namespace

TEST_CASE("table tiling: one and two steps from red") {
    auto tt = table_tiling();
    const auto& a = tt.sub.alphabet();
    Letter red = a.index("red");
    CHECK(tt.sub.iterate_letter(red, 0) == Patch({{make_point({0, 0}), red}}));
    CHECK(tt.sub.iterate_letter(red, 1) == grid_patch(a, -1, 0, {"UL", "DL"}));
    CHECK(tt.sub.iterate_letter(red, 2) == grid_patch(a, -3, 0, {"LRUL", "UUDL", "DDUL", "LRDL"}));
}

TEST_CASE("substitute_patch basics") {
    auto tt = table_tiling();
    CHECK(tt.sub.substitute(Patch()).empty());
    std::mt19937_64 rng(1);
    for (auto* f : {&tt}) {
        const auto& m = f->sub.model();
        for (int t = 0; t < 50; ++t) {
            Patch p = random_patch(m, f->sub.letters(), rng, 6, 5);
            Patch sp = f->sub.substitute(p);
            CHECK(sp.size() == p.size() * m.seed_cells().size());
            // equivariance
            Point g = make_point({static_cast<std::int64_t>(t) - 25, 3 * t % 7});
            CHECK(f->sub.substitute(p.translate(m, g)) == sp.translate(m, m.dilate(1, g)));
        }
    }
    auto h = heisenberg_example();
    const auto& hm = h.sub.model();
    for (int t = 0; t < 10; ++t) {
        Patch p = random_patch(hm, 2, rng, 3, 4);
        Point g = make_point({2 * t - 10, 4, -2 * t});
        CHECK(h.sub.substitute(p.translate(hm, g)) == h.sub.substitute(p).translate(hm, hm.dilate(1, g)));
    }
}

TEST_CASE("heisenberg rule cells") {
    auto h = heisenberg_example();
    Letter a = h.sub.alphabet().index("a");
    Letter b = h.sub.alphabet().index("b");
    for (Letter c : {a, b}) {
        Patch s = h.sub.iterate_letter(c, 1);
        CHECK(s.size() == 256);
        CHECK(*s.at(make_point({2, 2, -16})) == c);
        CHECK(*s.at(make_point({2, 2, -14})) == b);
        for (std::int64_t x = -4; x <= 2; x += 2)
            for (std::int64_t y = -4; y <= 2; y += 2)
                if (!(x == 0 && y == 0)) CHECK(*s.at(make_point({x, y, -2})) == b);
        for (std::int64_t z = -16; z < 16; z += 2) {
            CHECK(*s.at(make_point({0, 0, z})) == a);
            if (z != -2) CHECK(*s.at(make_point({0, 2, z})) == a);
        }
    }
}

TEST_CASE("restriction condition") {
    auto tt = table_tiling();
    auto h = heisenberg_example();
    for (auto* f : {&tt, &h}) {
        const auto& m = f->sub.model();
        int n = 1;
        for (Letter a = 0; a < f->sub.letters(); ++a) {
            Patch big = f->sub.iterate_letter(a, n + 1);
            Patch small = f->sub.iterate_letter(a, n);
            for (std::size_t i = 0; i < small.size(); ++i) {
                Patch one({{small.points()[i], small.values()[i]}});
                Patch img = f->sub.substitute(one);
                for (std::size_t j = 0; j < img.size(); ++j) CHECK(big.at(img.points()[j]) == img.values()[j]);
            }
        }
    }
}

TEST_CASE("expand matches substitute on a point list") {
    auto tt = table_tiling();
    const auto& m = tt.sub.model();
    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
        Patch p = random_patch(m, 4, rng, 5, 3);
        Word w = tt.sub.expand(p.values(), 2);
        auto seq = m.support_sequence(2, p.points());
        Patch q = tt.sub.substitute(tt.sub.substitute(p));
        REQUIRE(seq.size() == w.size());
        for (std::size_t i = 0; i < seq.size(); ++i) CHECK(*q.at(seq[i]) == w[i]);
    }
}

TEST_CASE("primitivity exponent") {
    auto tt = table_tiling();
    auto l = tt.sub.primitivity_exponent();
    REQUIRE(l.has_value());
    CHECK(*l == 2);
    CHECK(heisenberg_example().sub.primitivity_exponent() == 1);
    CHECK(period_doubling().sub.primitivity_exponent() == 2);
    Substitution ident(LatticeModel::zd({2}), Alphabet{{"a", "b"}, {0, 0}, {"", ""}}, {Word{0, 0}, Word{1, 1}});
    CHECK_FALSE(ident.primitivity_exponent().has_value());
    // oracle: direct expansion
    for (int n = 1; n <= 3; ++n) {
        bool all = true;
        for (Letter b = 0; b < 4; ++b) {
            Patch p = tt.sub.iterate_letter(b, n);
            for (Letter a = 0; a < 4; ++a) {
                bool seen = false;
                for (auto v : p.values()) seen |= v == a;
                all &= seen;
            }
        }
        CHECK(all == (n >= *l));
    }
}

TEST_CASE("window patches of periodic seeds") {
    auto tt = table_tiling();
    const auto& m = tt.sub.model();
    PointSet unit({make_point({0, 0}), make_point({0, 1}), make_point({1, 0}), make_point({1, 1})});
    CHECK(window_patches(m, tt.seed("const:red"), unit).size() == 1);
    auto rb = window_patches(m, tt.seed("rb"), unit);
    CHECK(rb.size() == 2);
    for (auto& w : rb) {
        CHECK(w[0] == w[3]);
        CHECK(w[1] == w[2]);
        CHECK(w[0] != w[1]);
    }
}

TEST_CASE("substitute_periodic") {
    auto tt = table_tiling();
    const auto& m = tt.sub.model();
    PeriodicConfig rb = tt.seed("rb");
    for (int n = 1; n <= 3; ++n) {
        PeriodicConfig s = substitute_periodic(tt.sub, rb, n);
        REQUIRE(s.kind() == PeriodicConfig::Kind::Zd);
        CHECK(s.period() == std::vector<std::int64_t>{2 << n, 2 << n});
        // compare with the finite route on a patch of the seed
        std::vector<std::pair<Point, Letter>> e;
        for (std::int64_t x = -3; x <= 3; ++x)
            for (std::int64_t y = -3; y <= 3; ++y) e.push_back({make_point({x, y}), rb.at(m, make_point({x, y}))});
        Patch p(e);
        for (int i = 0; i < n; ++i) p = tt.sub.substitute(p);
        for (std::size_t i = 0; i < p.size(); ++i) CHECK(s.at(m, p.points()[i]) == p.values()[i]);
    }
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> d(-500, 500);
    PeriodicConfig s2 = substitute_periodic(tt.sub, rb, 2);
    for (int t = 0; t < 100; ++t) {
        Point g = make_point({d(rng), d(rng)});
        Point g2 = make_point({g[0] + 8 * d(rng), g[1] - 8 * d(rng)});
        CHECK(s2.at(m, g) == s2.at(m, g2));
    }

    auto h = heisenberg_example();
    const auto& hm = h.sub.model();
    for (Letter a = 0; a < 2; ++a) {
        PeriodicConfig c = PeriodicConfig::constant(a);
        for (int n = 1; n <= 2; ++n) {
            PeriodicConfig s = substitute_periodic(h.sub, c, n);
            Patch p = h.sub.iterate_letter(a, n);
            for (std::size_t i = 0; i < p.size(); ++i) CHECK(s.at(hm, p.points()[i]) == p.values()[i]);
            // periodic under D^n(Gamma)
            std::uniform_int_distribution<int> e(-20, 20);
            for (int t = 0; t < 100; ++t) {
                Point g = make_point({2 * e(rng), 2 * e(rng), 2 * e(rng)});
                Point per = hm.dilate(n, make_point({2 * e(rng), 2 * e(rng), 2 * e(rng)}));
                CHECK(s.at(hm, g) == s.at(hm, hm.multiply(per, g)));
            }
        }
    }
}
