#include "aperiodiq/catalog.hpp"

namespace aperiodiq {

PeriodicConfig SubstitutionFile::seed(const std::string& name) const {
    const std::string prefix = "const:";
    if (name.rfind(prefix, 0) == 0) return PeriodicConfig::constant(sub.alphabet().index(name.substr(prefix.size())));
    for (auto& s : seeds)
        if (s.name == name) return s.config;
    throw InputError("unknown seed '" + name + "'");
}

SubstitutionFile table_tiling() {
    Alphabet a{{"red", "yellow", "blue", "gray"}, {0, 1, 2, 3}, {"#d62728", "#f2c500", "#1f77b4", "#8c8c8c"}};
    const Letter L = 0, U = 1, R = 2, D = 3;
    // cells: (-1,-1) (-1,0) (0,-1) (0,0)
    std::vector<Word> rule(4);
    rule[L] = Word{D, U, L, L};
    rule[U] = Word{U, L, U, R};
    rule[R] = Word{R, R, D, U};
    rule[D] = Word{L, D, R, D};
    Substitution s(LatticeModel::zd({2, 2}), a, rule);
    return {s,
            {{"rb", PeriodicConfig::zd({2, 2}, Word{L, R, R, L})}, {"gy", PeriodicConfig::zd({2, 2}, Word{D, U, U, D})}}};
}

SubstitutionFile heisenberg_example() {
    Alphabet alpha{{"a", "b"}, {0, 1}, {"#2ca02c", "#9467bd"}};
    const Letter A = 0, B = 1;
    auto m = LatticeModel::heisenberg(4);
    const auto& cells = m.seed_cells();
    auto rule_for = [&](Letter c) {
        Word w(cells.size(), c);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const Point& p = cells[i];
            std::int64_t x = p[0], y = p[1], z = p[2];
            bool xi_o = z == -2 && !(x == 0 && y == 0);
            bool xi_a = x == 0 && (y == 0 || (y == 2 && z != -2));
            if (xi_o || (x == 2 && y == 2 && z == -14)) w[i] = B;
            if (xi_a) w[i] = A;
        }
        return w;
    };
    Substitution s(m, alpha, {rule_for(A), rule_for(B)});
    return {s, {}};
}

SubstitutionFile period_doubling() {
    Alphabet alpha{{"a", "b"}, {0, 1}, {"#1f77b4", "#ff7f0e"}};
    // cells: -1, 0
    Substitution s(LatticeModel::zd({2}), alpha, {Word{0, 1}, Word{0, 0}});
    return {s, {{"ab", PeriodicConfig::zd({2}, Word{0, 1})}}};
}

}  // namespace aperiodiq
