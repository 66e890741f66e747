// ctxq: build context posets from observable files, report Born tables,
// search for global sections and generate fixtures.
//
// Exit codes: 0 success, 1 I/O or parse error, 2 domain validation error,
// 3 numerical failure (NoConvergence).

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctxq/ctxq.hpp"
#include "ctxq/io.hpp"

namespace {

using ctxq::io::json;

struct RunConfig {
    double eps = 1e-9;
    double eigengap = 1e-8;
    std::uint64_t seed = 0;
    std::string format = "json";
    std::string out;

    ctxq::Tolerance tolerance() const { return {eps, eigengap}; }
};

void emit(const RunConfig &cfg, const std::string &text) {
    if (cfg.out.empty() || cfg.out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!(f << text)) throw ctxq::io::ParseError("cannot write " + cfg.out);
}

void require_json(const RunConfig &cfg, const char *command) {
    if (cfg.format != "json") throw ctxq::io::ParseError(std::string(command) + " only supports --format json");
}

// --- contexts build ---------------------------------------------------------

void cmd_contexts(const RunConfig &cfg, const std::vector<std::string> &files) {
    const ctxq::Tolerance tol = cfg.tolerance();
    require_json(cfg, "contexts build");
    std::vector<ctxq::Context> generated;
    std::optional<std::size_t> dim;
    for (const auto &path : files) {
        const auto families = ctxq::io::families_from_json(ctxq::io::read_json_file(path));
        for (std::size_t k = 0; k < families.size(); ++k) {
            const std::string where = path + ", family " + std::to_string(k + 1);
            if (families[k].empty()) throw ctxq::io::ParseError(where + ": no observables");
            try {
                const std::size_t n = families[k].front().n();
                if (dim && *dim != n) {
                    throw ctxq::Error(ctxq::ErrorKind::DimensionMismatch,
                                      "dimension " + std::to_string(n) + ", expected " + std::to_string(*dim));
                }
                dim = n;
                generated.push_back(ctxq::generate_context(families[k], tol));
            } catch (const ctxq::Error &e) {
                throw ctxq::Error(e.kind(), where + ": " + e.detail());
            }
        }
    }
    if (!dim) throw ctxq::io::ParseError("no observable families in input");
    emit(cfg, ctxq::io::dump(ctxq::io::to_json(ctxq::build_poset(*dim, generated, tol))));
}

// --- born -------------------------------------------------------------------

std::size_t resolve(const ctxq::ContextPoset &p, const std::string &id) {
    if (id == "bottom") return *p.bottom_index();
    auto k = p.index_of(id);
    if (!k) throw ctxq::Error(ctxq::ErrorKind::UnknownContext, id);
    return *k;
}

std::vector<std::string> marginal_violations(const ctxq::BornTable &t) {
    constexpr double tol = 1e-9;
    std::vector<std::string> out;
    const auto rows = t.row_marginals(), cols = t.col_marginals();
    for (std::size_t i = 0; i < t.rows(); ++i) {
        const double mu = static_cast<double>(t.left().system.type().parts[i]);
        if (!(std::abs(rows[i] - mu) <= tol)) out.push_back("row marginal " + std::to_string(i + 1) + " is not its rank");
    }
    for (std::size_t j = 0; j < t.cols(); ++j) {
        const double nu = static_cast<double>(t.right().system.type().parts[j]);
        if (!(std::abs(cols[j] - nu) <= tol)) out.push_back("column marginal " + std::to_string(j + 1) + " is not its rank");
    }
    const double n = static_cast<double>(t.left().dim());
    if (!(std::abs(t.total() - n) <= tol)) out.push_back("total mass is not the dimension");
    return out;
}

void cmd_born(const RunConfig &cfg, const std::string &path, const std::string &left, const std::string &right,
              bool check_coherence) {
    const ctxq::Tolerance tol = cfg.tolerance();
    const ctxq::ContextPoset p = ctxq::io::poset_from_json(ctxq::io::read_json_file(path), tol);
    const std::size_t l = resolve(p, left), r = resolve(p, right);
    const ctxq::BornTable table = ctxq::born_table(p[l], p[r]);
    if (cfg.format == "csv") {
        emit(cfg, ctxq::io::born_csv(table));
        return;
    }
    require_json(cfg, "born");

    auto violations = marginal_violations(table);
    json report;
    if (check_coherence) {
        std::size_t checked = 0;
        for (std::size_t c = 0; c < p.size(); ++c) {
            if (!p.leq(c, l)) continue;
            for (std::size_t d = 0; d < p.size(); ++d) {
                if (!p.leq(d, r)) continue;
                ++checked;
                if (!ctxq::coherence_check(table, ctxq::born_table(p[c], p[d]), p.witness(c, l), p.witness(d, r))) {
                    violations.push_back("coherence fails at (" + p[c].id + ", " + p[d].id + ")");
                }
            }
        }
        report = ctxq::io::born_report(table, violations);
        report["coherence_checked"] = checked;
    } else {
        report = ctxq::io::born_report(table, violations);
    }
    emit(cfg, ctxq::io::dump(report));
}

// --- sections search --------------------------------------------------------

void cmd_sections(const RunConfig &cfg, const std::string &path, std::optional<std::uint64_t> cap) {
    require_json(cfg, "sections search");
    const ctxq::ContextPoset p = ctxq::io::poset_from_json(ctxq::io::read_json_file(path), cfg.tolerance());
    const ctxq::SearchResult result = ctxq::search_global_section(p);
    json report = {
        {"outcome", result.section ? "found" : "none"},
        {"contexts", p.size()},
        {"stats", {{"nodes_visited", result.stats.nodes_visited}, {"branching_contexts", result.stats.branching_contexts}}},
        {"note", "sections are discrete assignments; continuity in the manifold topology is not checked"},
    };
    if (result.section) {
        report["section"] = ctxq::io::to_json(*result.section);
        report["verified"] = ctxq::check_section(p, *result.section);
    }
    if (cap) report["count"] = {{"cap", *cap}, {"sections", ctxq::count_global_sections(p, *cap)}};
    emit(cfg, ctxq::io::dump(report));
}

// --- qubit table ------------------------------------------------------------

ctxq::BlochVector bloch(const std::vector<double> &v) { return ctxq::BlochVector::normalized(v[0], v[1], v[2]); }

void cmd_qubit(const RunConfig &cfg, const std::vector<double> &av, const std::vector<double> &bv) {
    const ctxq::Tolerance tol = cfg.tolerance();
    const ctxq::BlochVector a = bloch(av), b = bloch(bv);
    const ctxq::BornTable table = ctxq::born_table(ctxq::qubit_context(a, tol), ctxq::qubit_context(b, tol));
    if (cfg.format == "csv") {
        emit(cfg, ctxq::io::born_csv(table));
        return;
    }
    require_json(cfg, "qubit table");
    const auto closed = ctxq::qubit_born_closed_form(a, b, tol);
    double deviation = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) deviation = std::max(deviation, std::abs(table(i, j) - closed[i][j]));
    auto violations = marginal_violations(table);
    if (!(deviation <= 1e-12)) violations.push_back("generic table differs from the closed form");
    json report = ctxq::io::born_report(table, violations);
    report["a"] = a.components();
    report["b"] = b.components();
    report["closed_form"] = closed;
    report["max_deviation"] = deviation;
    emit(cfg, ctxq::io::dump(report));
}

// --- fixtures generate ------------------------------------------------------

void cmd_fixtures(const RunConfig &cfg, const std::string &kind, std::size_t count, std::size_t dim) {
    require_json(cfg, "fixtures generate");
    ctxq::Fixture f;
    if (kind == "mermin-peres") {
        f = ctxq::mermin_peres_fixture();
    } else if (kind == "bloch") {
        f = ctxq::random_bloch_poset(count, cfg.seed);
    } else if (kind == "overlap") {
        f = ctxq::random_overlap_fixture(dim, count, cfg.seed);
    } else {
        f = ctxq::Fixture{"commuting-n" + std::to_string(dim) + "-l" + std::to_string(count) + "-seed-" +
                              std::to_string(cfg.seed),
                          dim,
                          cfg.seed,
                          {ctxq::random_commuting_family(dim, count, cfg.seed)},
                          {true, std::nullopt}};
    }
    emit(cfg, ctxq::io::dump(ctxq::io::to_json(f)));
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Contexts, Born valuations and global sections for finite-dimensional quantum systems", "ctxq"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    // Positivity is checked by Tolerance so that flag and environment values
    // fail the same way.
    app.add_option("--tol", cfg.eps, "Numerical tolerance eps")->envname("CTXQ_TOL");
    app.add_option("--eigengap", cfg.eigengap, "Eigenvalue grouping gap")->envname("CTXQ_EIGENGAP");
    app.add_option("--seed", cfg.seed, "Seed for generated fixtures")->envname("CTXQ_SEED");
    app.add_option("--format", cfg.format, "Output format")->envname("CTXQ_FORMAT")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", cfg.out, "Output file (default stdout)")->envname("CTXQ_OUT");

    std::function<void()> action;

    auto *contexts = app.add_subcommand("contexts", "Context posets");
    contexts->require_subcommand(1);
    std::vector<std::string> files;
    auto *build = contexts->add_subcommand("build", "Build a poset from observable files");
    build->add_option("files", files, "Observable family files")->required();
    build->callback([&] { action = [&] { cmd_contexts(cfg, files); }; });

    auto *born = app.add_subcommand("born", "Born table of a context pair");
    std::string born_poset, left, right;
    bool check_coherence = false;
    born->add_option("poset", born_poset, "Poset file")->required();
    born->add_option("--left", left, "Left context id (or 'bottom')")->required();
    born->add_option("--right", right, "Right context id (or 'bottom')")->required();
    born->add_flag("--check-coherence", check_coherence, "Check coherence against every coarser pair");
    born->callback([&] { action = [&] { cmd_born(cfg, born_poset, left, right, check_coherence); }; });

    auto *sections = app.add_subcommand("sections", "Global sections");
    sections->require_subcommand(1);
    auto *search = sections->add_subcommand("search", "Search a poset for a global section");
    std::string sections_poset;
    std::optional<std::uint64_t> cap;
    search->add_option("poset", sections_poset, "Poset file")->required();
    search->add_option("--count", cap, "Also count sections, up to this cap")->check(CLI::PositiveNumber);
    search->callback([&] { action = [&] { cmd_sections(cfg, sections_poset, cap); }; });

    auto *qubit = app.add_subcommand("qubit", "Qubit contexts");
    qubit->require_subcommand(1);
    auto *table = qubit->add_subcommand("table", "Born table of two Bloch-vector contexts");
    std::vector<double> av, bv;
    table->add_option("--a", av, "Bloch vector a: x y z")->expected(3)->required();
    table->add_option("--b", bv, "Bloch vector b: x y z")->expected(3)->required();
    table->callback([&] { action = [&] { cmd_qubit(cfg, av, bv); }; });

    auto *fixtures = app.add_subcommand("fixtures", "Fixture data");
    fixtures->require_subcommand(1);
    auto *generate = fixtures->add_subcommand("generate", "Generate a fixture file");
    std::string kind;
    std::size_t count = 20, dim = 3;
    generate->add_option("kind", kind, "Fixture kind")
        ->required()
        ->check(CLI::IsMember({"mermin-peres", "bloch", "overlap", "commuting"}));
    generate->add_option("--count", count, "Bloch axes, overlap families, or commuting observables")
        ->check(CLI::PositiveNumber);
    generate->add_option("--dim", dim, "Dimension for overlap and commuting fixtures")->check(CLI::PositiveNumber);
    generate->callback([&] { action = [&] { cmd_fixtures(cfg, kind, count, dim); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        (void)cfg.tolerance();
        action();
    } catch (const ctxq::io::ParseError &e) {
        std::cerr << "ctxq: " << e.what() << "\n";
        return 1;
    } catch (const ctxq::Error &e) {
        std::cerr << "ctxq: " << e.what() << "\n";
        return e.kind() == ctxq::ErrorKind::NoConvergence ? 3 : 2;
    } catch (const std::invalid_argument &e) {
        std::cerr << "ctxq: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "ctxq: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
