#include "aperiodiq/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace aperiodiq {

namespace {

struct Line {
    int number;
    std::string text;  // trimmed
    bool indented;
};

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> tokens(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

class Parser {
public:
    explicit Parser(std::string origin) : origin_(std::move(origin)) {}

    [[noreturn]] void fail(int line, const std::string& msg) const {
        if (line > 0) throw InputError(origin_ + ": line " + std::to_string(line) + ": " + msg);
        throw InputError(origin_ + ": " + msg);
    }

    SubstitutionFile run(std::string_view text) {
        std::map<std::string, std::vector<Line>> sections;
        std::map<std::string, int> header_line;
        std::string current;
        int number = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            auto end = text.find('\n', pos);
            if (end == std::string_view::npos) end = text.size();
            auto raw = text.substr(pos, end - pos);
            pos = end + 1;
            ++number;
            std::string t = trim(raw);
            if (t.empty() || t[0] == '#') continue;
            if (t.front() == '[') {
                if (t.back() != ']') fail(number, "malformed section header");
                current = t.substr(1, t.size() - 2);
                if (current != "lattice" && current != "alphabet" && current != "rule" && current != "seeds")
                    fail(number, "unknown section [" + current + "]");
                if (header_line.count(current)) fail(number, "section [" + current + "] appears twice");
                header_line[current] = number;
                sections[current];
                continue;
            }
            if (current.empty()) fail(number, "content before the first section");
            bool indented = !raw.empty() && (raw[0] == ' ' || raw[0] == '\t');
            sections[current].push_back({number, t, indented});
        }
        auto need = [&](const char* name) -> const std::vector<Line>& {
            if (!sections.count(name)) fail(0, std::string("missing [") + name + "] section");
            return sections[name];
        };
        auto model = lattice(need("lattice"), header_line["lattice"]);
        auto alpha = alphabet(need("alphabet"));
        auto table = rule(need("rule"), model, alpha);
        SubstitutionFile f{Substitution(model, alpha, table), {}};
        if (sections.count("seeds")) f.seeds = seeds(sections["seeds"], model, alpha);
        return f;
    }

private:
    std::string origin_;

    // "key = value"
    std::pair<std::string, std::string> key_value(const Line& l) const {
        auto eq = l.text.find('=');
        if (eq == std::string::npos) fail(l.number, "expected key = value");
        return {trim(l.text.substr(0, eq)), trim(l.text.substr(eq + 1))};
    }

    int integer(const Line& l, const std::string& s) const {
        int v = 0;
        auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (r.ec != std::errc() || r.ptr != s.data() + s.size()) fail(l.number, "not an integer: '" + s + "'");
        return v;
    }

    LatticeModel lattice(const std::vector<Line>& lines, int header) const {
        std::string kind;
        std::vector<int> scales;
        int stretch = 0;
        int kind_line = header;
        for (auto& l : lines) {
            auto [k, v] = key_value(l);
            if (k == "kind") {
                if (v != "zd" && v != "heisenberg") fail(l.number, "lattice kind must be zd or heisenberg");
                kind = v;
                kind_line = l.number;
            } else if (k == "scales") {
                for (auto& t : tokens(v)) scales.push_back(integer(l, t));
            } else if (k == "stretch") {
                stretch = integer(l, v);
            } else {
                fail(l.number, "unknown lattice key '" + k + "'");
            }
        }
        try {
            if (kind == "zd") {
                if (stretch) fail(kind_line, "zd lattices take scales, not stretch");
                return LatticeModel::zd(scales);
            }
            if (kind == "heisenberg") {
                if (!scales.empty()) fail(kind_line, "heisenberg lattices take stretch, not scales");
                return LatticeModel::heisenberg(stretch ? stretch : 4);
            }
        } catch (const InputError& e) {
            if (std::string(e.what()).rfind(origin_, 0) == 0) throw;
            fail(kind_line, e.what());
        }
        fail(header, "lattice kind missing");
    }

    Alphabet alphabet(const std::vector<Line>& lines) const {
        Alphabet a;
        for (auto& l : lines) {
            auto t = tokens(l.text);
            if (t.size() < 2 || t.size() > 3) fail(l.number, "expected: name potential [color]");
            double v = 0;
            auto r = std::from_chars(t[1].data(), t[1].data() + t[1].size(), v);
            if (r.ec != std::errc() || r.ptr != t[1].data() + t[1].size()) fail(l.number, "bad potential '" + t[1] + "'");
            a.names.push_back(t[0]);
            a.potential.push_back(v);
            a.color.push_back(t.size() == 3 ? t[2] : std::string());
        }
        try {
            a.validate();
        } catch (const InputError& e) {
            fail(lines.empty() ? 0 : lines.front().number, e.what());
        }
        return a;
    }

    Letter letter(const Line& l, const Alphabet& a, const std::string& name) const {
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a.names[i] == name) return static_cast<Letter>(i);
        fail(l.number, "unknown letter '" + name + "'");
    }

    // "head = tokens" followed by continuation lines without '='
    struct Entry {
        Line head;
        std::string key;
        std::vector<std::string> toks;
    };
    std::vector<Entry> entries(const std::vector<Line>& lines, char sep) const {
        std::vector<Entry> out;
        for (auto& l : lines) {
            auto at = l.text.find(sep);
            if (at == std::string::npos || l.indented) {
                if (out.empty() || !l.indented) fail(l.number, std::string("expected '") + sep + "'");
                for (auto& t : tokens(l.text)) out.back().toks.push_back(t);
                continue;
            }
            out.push_back({l, trim(l.text.substr(0, at)), tokens(l.text.substr(at + 1))});
        }
        return out;
    }

    std::vector<Word> rule(const std::vector<Line>& lines, const LatticeModel& m, const Alphabet& a) const {
        const std::size_t cells = m.seed_cells().size();
        std::vector<Word> table(a.size());
        std::vector<char> seen(a.size(), 0);
        for (auto& e : entries(lines, '=')) {
            Letter c = letter(e.head, a, e.key);
            if (seen[c]) fail(e.head.number, "second rule for letter '" + e.key + "'");
            seen[c] = 1;
            if (e.toks.size() != cells)
                fail(e.head.number, "rule for '" + e.key + "' has " + std::to_string(e.toks.size()) +
                                        " cells; the lattice expects " + std::to_string(cells));
            for (auto& t : e.toks) table[c].push_back(letter(e.head, a, t));
        }
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!seen[i]) fail(0, "no rule for letter '" + a.names[i] + "'");
        return table;
    }

    std::vector<NamedSeed> seeds(const std::vector<Line>& lines, const LatticeModel& m, const Alphabet& a) const {
        std::vector<NamedSeed> out;
        for (auto& e : entries(lines, ':')) {
            auto head = tokens(e.key);
            if (head.size() < 3 || head[1] != "period") fail(e.head.number, "expected: name period p1 .. pd : letters");
            if (m.kind() != LatticeKind::Zd) fail(e.head.number, "block seeds need a zd lattice");
            if (static_cast<int>(head.size()) - 2 != m.dim()) fail(e.head.number, "period needs one entry per axis");
            for (auto& s : out)
                if (s.name == head[0]) fail(e.head.number, "duplicate seed '" + head[0] + "'");
            if (head[0].rfind("const:", 0) == 0) fail(e.head.number, "names starting with const: are reserved");
            std::vector<std::int64_t> period;
            std::size_t cells = 1;
            for (std::size_t i = 2; i < head.size(); ++i) {
                int p = integer(e.head, head[i]);
                if (p < 1) fail(e.head.number, "periods must be positive");
                period.push_back(p);
                cells *= static_cast<std::size_t>(p);
            }
            if (e.toks.size() != cells)
                fail(e.head.number, "seed '" + head[0] + "' has " + std::to_string(e.toks.size()) +
                                        " letters; its period expects " + std::to_string(cells));
            Word block;
            for (auto& t : e.toks) block.push_back(letter(e.head, a, t));
            out.push_back({head[0], PeriodicConfig::zd(period, block)});
        }
        return out;
    }
};

std::string number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_tokens(std::ostringstream& out, const Alphabet& a, const Word& w) {
    constexpr std::size_t per_line = 16;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i > 0 && i % per_line == 0)
            out << "\n   ";
        out << ' ' << a.names[w[i]];
    }
    out << '\n';
}

}  // namespace

SubstitutionFile parse_substitution(std::string_view text, const std::string& origin) {
    return Parser(origin).run(text);
}

SubstitutionFile load_substitution(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_substitution(buf.str(), path.string());
}

std::string serialize_substitution(const SubstitutionFile& f) {
    const auto& m = f.sub.model();
    const auto& a = f.sub.alphabet();
    std::ostringstream out;
    out << "[lattice]\n";
    if (m.kind() == LatticeKind::Zd) {
        out << "kind = zd\nscales =";
        for (int s : m.scales()) out << ' ' << s;
        out << '\n';
    } else {
        out << "kind = heisenberg\nstretch = " << m.stretch() << '\n';
    }
    out << "\n[alphabet]\n";
    for (std::size_t i = 0; i < a.size(); ++i) {
        out << a.names[i] << ' ' << number(a.potential[i]);
        if (!a.color[i].empty()) out << ' ' << a.color[i];
        out << '\n';
    }
    out << "\n[rule]\n";
    for (std::size_t i = 0; i < a.size(); ++i) {
        out << a.names[i] << " =";
        write_tokens(out, a, f.sub.image(static_cast<Letter>(i)));
    }
    if (!f.seeds.empty()) {
        out << "\n[seeds]\n";
        for (auto& s : f.seeds) {
            out << s.name << " period";
            for (auto p : s.config.period()) out << ' ' << p;
            out << " :";
            write_tokens(out, a, s.config.block());
        }
    }
    return out.str();
}

bool same_structure(const SubstitutionFile& x, const SubstitutionFile& y) {
    if (!(x.sub == y.sub) || x.seeds.size() != y.seeds.size()) return false;
    for (std::size_t i = 0; i < x.seeds.size(); ++i) {
        const auto& p = x.seeds[i];
        const auto& q = y.seeds[i];
        if (p.name != q.name || p.config.kind() != q.config.kind() || p.config.period() != q.config.period() ||
            p.config.block() != q.config.block() || p.config.letter() != q.config.letter())
            return false;
    }
    return true;
}

}  // namespace aperiodiq
