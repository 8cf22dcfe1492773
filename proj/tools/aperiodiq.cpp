// aperiodiq check | reduce | rate | spectrum
// Exit codes: 0 converges / ok, 1 diverges, 2 input or resource error, 3 unsupported.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>

#include "CLI11.hpp"
#include "json.hpp"

#include "aperiodiq/convergence.hpp"
#include "aperiodiq/io.hpp"
#include "aperiodiq/spectral.hpp"

using namespace aperiodiq;

namespace {

enum Exit { kConverges = 0, kDiverges = 1, kInput = 2, kUnsupported = 3 };

void write_file(const std::string& path, const std::string& text) {
    if (path.empty()) return;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << text;
}

nlohmann::ordered_json points_json(const PointSet& s, int dim) {
    auto a = nlohmann::ordered_json::array();
    for (auto& p : s) {
        auto q = nlohmann::ordered_json::array();
        for (int i = 0; i < dim; ++i) q.push_back(p[i]);
        a.push_back(q);
    }
    return a;
}

struct Checked {
    PointSet shape;
    int step = 1;
    ConvergenceCertificate cert;
};

Checked run_check(const Dictionary& d, const PeriodicConfig& w) {
    const auto& m = d.substitution().model();
    Checked c;
    c.shape = base_shape(m);
    c.step = compute_n_t(m, c.shape);
    SubstitutionGraph g(d, c.shape, c.step);
    c.cert = certify(g, w);
    return c;
}

void print_witness(const Substitution& s, const ConvergenceCertificate& c) {
    std::cerr << "diverges: illegal windows repeat along\n";
    for (std::size_t i = 0; i < c.path.size(); ++i) {
        std::cerr << (i == c.cycle_from ? "  * " : "    ") << render_word(s.alphabet(), c.path[i]) << '\n';
    }
    std::cerr << "  (* marks the start of the closed part; the last window equals it)\n";
}

int cmd_check(const std::string& file, const std::string& seed, const std::string& json_out) {
    auto f = load_substitution(file);
    auto w = f.seed(seed);
    Dictionary d(f.sub);
    auto c = run_check(d, w);
    SubstitutionGraph g(d, c.shape, c.step);
    auto json = certificate_json(g, c.cert);
    std::cout << json << '\n';
    write_file(json_out, json + "\n");
    if (c.cert.verdict == Verdict::diverges) {
        print_witness(f.sub, c.cert);
        return kDiverges;
    }
    std::cerr << "converges: |T| = " << c.shape.size() << ", N_T = " << c.step << ", illegal windows met "
              << c.cert.explored << ", n0 <= " << c.cert.n0_bound.str() << '\n';
    return kConverges;
}

int cmd_reduce(const std::string& file, int n0, long max_size, const std::string& json_out) {
    auto f = load_substitution(file);
    const auto& m = f.sub.model();
    auto ref = canonical_domain(m);
    auto red = reduce_domain(m, ref.domain, n0);
    std::vector<std::size_t> sizes{ref.domain.size()};
    for (auto& s : red.steps) sizes.push_back(s.domain.size());
    const auto& result = red.result();

    // the shipped base shape, checked directly against the reference
    auto base = base_shape(m);
    auto vb = verify_domain(m, ref.domain, base, n0);

    nlohmann::ordered_json j;
    j["format"] = 1;
    j["lattice"] = m.describe();
    j["n0"] = n0;
    j["reference"] = points_json(ref.domain, m.dim());
    j["sizes"] = sizes;
    j["domain"] = points_json(result, m.dim());
    auto& chain = j["chain"] = nlohmann::ordered_json::array();
    for (auto& s : red.steps) {
        nlohmann::ordered_json step;
        step["size"] = s.domain.size();
        auto pairs = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < s.certificate.xs.size(); ++i)
            pairs.push_back({points_json(PointSet({s.certificate.xs[i]}), m.dim())[0],
                             points_json(PointSet({s.certificate.witnesses[i]}), m.dim())[0]});
        step["witnesses"] = pairs;
        chain.push_back(step);
    }
    j["base_shape"] = {{"size", base.size()}, {"verified", vb.ok}};
    auto text = j.dump(2);
    write_file(json_out, text + "\n");

    std::string ledger;
    for (std::size_t i = 0; i < sizes.size(); ++i) ledger += (i ? " -> " : "") + std::to_string(sizes[i]);
    std::cout << "reference: " << ref.domain.size() << " points\n";
    std::cout << "ledger: " << ledger << '\n';
    std::cout << "reduced domain:";
    for (auto& p : result) std::cout << ' ' << to_string(p, m.dim());
    std::cout << '\n';
    std::cout << "base shape (" << base.size() << " points): "
              << (vb.ok ? "confirmed" : "not verified at " + to_string(*vb.failure, m.dim())) << '\n';
    if (max_size > 0 && result.size() > static_cast<std::size_t>(max_size))
        throw ResourceError("no verified domain with at most " + std::to_string(max_size) + " points (smallest found has " +
                            std::to_string(result.size()) + ")");
    return vb.ok ? kConverges : kInput;
}

int cmd_rate(const std::string& file, const std::string& seed, int nmax, long rmax, const std::string& json_out) {
    auto f = load_substitution(file);
    auto w = f.seed(seed);
    Dictionary d(f.sub);
    auto c = run_check(d, w);
    if (c.cert.verdict == Verdict::diverges) {
        print_witness(f.sub, c.cert);
        return kDiverges;
    }
    auto rep = rate_report(d, w, c.cert.n0_measured, nmax, rmax);
    std::cout << rate_csv(rep);
    write_file(json_out, rate_json(rep) + "\n");
    std::fprintf(stderr, "slope %.6f (reference -log l0 = %.6f), C = %.6g, C_LR >= %s, min delta_n l0^n = %.6g\n",
                 rep.slope, -std::log(static_cast<double>(f.sub.model().stretch())), rep.constants.c,
                 (std::to_string(rep.constants.c_lr.numerator()) + "/" + std::to_string(rep.constants.c_lr.denominator())).c_str(),
                 rep.lower_c);
    return kConverges;
}

std::pair<int, int> parse_range(const std::string& s) {
    auto colon = s.find(':');
    try {
        if (colon == std::string::npos) {
            int n = std::stoi(s);
            return {n, n};
        }
        return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
    } catch (const std::exception&) {
        throw InputError("--n expects N or LO:HI, got '" + s + "'");
    }
}

int cmd_spectrum(const std::string& file, const std::string& seed, const std::string& nrange, int grid,
                 const std::string& op, const std::string& csv_out, const std::string& json_out) {
    auto f = load_substitution(file);
    const auto& m = f.sub.model();
    if (m.kind() != LatticeKind::Zd) throw UnsupportedError("spectra need a zd lattice");
    auto w = f.seed(seed);
    auto [lo, hi] = parse_range(nrange);
    if (lo < 0 || hi < lo) throw InputError("bad --n range");

    Dictionary d(f.sub);
    OperatorSpec spec;
    if (op == "laplacian" || op == "witness") spec = nearest_neighbour(m.dim(), f.sub.alphabet().potential);
    else if (op == "potential") spec.potential = f.sub.alphabet().potential;
    else throw InputError("unknown operator '" + op + "' (laplacian, potential, witness)");
    if (op == "witness") spec = with_witness(spec, d, base_shape(m));
    spec.validate(m, f.sub.letters());

    if (lo == hi) {
        auto sp = spectrum(spec, m, substitute_periodic(f.sub, w, lo), grid, Exec::parallel, true);
        auto csv = spectrum_csv(sp);
        auto json = band_json(sp);
        if (csv_out.empty()) std::cout << csv;
        write_file(csv_out, csv);
        if (json_out.empty()) std::cerr << json << '\n';
        write_file(json_out, json + "\n");
        return kConverges;
    }

    auto c = run_check(d, w);
    double bound = std::numeric_limits<double>::quiet_NaN();
    if (c.cert.verdict == Verdict::converges) bound = rate_constants(m, lin_rep_lower_bound(d, 3), c.cert.n0_measured).c;
    else std::cerr << "seed diverges; the bound column is left undefined\n";
    // levels below lo are skipped by substituting up front
    auto start = substitute_periodic(f.sub, w, lo);
    auto table = spectral_convergence_table(f.sub, spec, start, hi - lo, grid, bound, 4096);
    for (auto& r : table.rows) {
        r.n += lo;
        r.bound = bound / std::pow(static_cast<double>(m.stretch()), r.n);
    }
    table.largest_n += lo;
    auto csv = spectral_csv(table);
    if (csv_out.empty()) std::cout << csv;
    write_file(csv_out, csv);
    write_file(json_out, spectral_json(table) + "\n");
    if (table.capped) std::cerr << "matrix size cap reached; largest feasible n = " << table.largest_n << '\n';
    return kConverges;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Substitution subshifts on lattices: convergence of periodic approximations, rates, spectra"};
    app.require_subcommand(1);

    std::string file, seed = "rb", json_out, csv_out, nrange = "0", op = "laplacian";
    int n0 = 1, nmax = 5, grid = 32;
    long max_size = 0, rmax = 64;

    auto* check = app.add_subcommand("check", "decide convergence of S^n(seed)");
    check->add_option("file", file, ".sub file")->required();
    check->add_option("seed", seed, "seed name or const:<letter>")->required();
    check->add_option("--json", json_out, "also write the certificate here");

    auto* reduce = app.add_subcommand("reduce", "verify and shrink a testing domain");
    reduce->add_option("file", file, ".sub file")->required();
    reduce->add_option("--n0", n0, "inflation steps per verification")->check(CLI::Range(1, 4));
    reduce->add_option("--max-size", max_size, "fail unless the result has at most this many points");
    reduce->add_option("--json", json_out, "write domains and certificates here");

    auto* rate = app.add_subcommand("rate", "measure delta_n = d(Omega(S^n(seed)), Omega(S))");
    rate->add_option("file", file, ".sub file")->required();
    rate->add_option("seed", seed, "seed name")->required();
    rate->add_option("--nmax", nmax, "largest n")->check(CLI::Range(1, 16));
    rate->add_option("--rmax", rmax, "largest radius searched")->check(CLI::Range(1L, 1L << 20));
    rate->add_option("--json", json_out, "also write JSON here");

    auto* spec = app.add_subcommand("spectrum", "Floquet-Bloch spectra of S^n(seed)");
    spec->add_option("file", file, ".sub file")->required();
    spec->add_option("seed", seed, "seed name")->required();
    spec->add_option("--n", nrange, "level N, or LO:HI for a convergence table");
    spec->add_option("--grid", grid, "theta points per axis")->check(CLI::Range(1, 4096));
    spec->add_option("--operator", op, "laplacian | potential | witness");
    spec->add_option("--csv", csv_out, "write CSV here instead of stdout");
    spec->add_option("--json", json_out, "write JSON here (single n: stderr otherwise)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInput;
    }

    try {
        if (*check) return cmd_check(file, seed, json_out);
        if (*reduce) return cmd_reduce(file, n0, max_size, json_out);
        if (*rate) return cmd_rate(file, seed, nmax, rmax, json_out);
        if (*spec) return cmd_spectrum(file, seed, nrange, grid, op, csv_out, json_out);
    } catch (const UnsupportedError& e) {
        std::cerr << "unsupported: " << e.what() << '\n';
        return kUnsupported;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    }
    return kInput;
}
