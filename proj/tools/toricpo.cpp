// toricpo: potential functions, critical points, leading term equations and
// residue pairings of toric manifolds from the command line.

#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "toricpo/config.hpp"
#include "toricpo/io.hpp"
#include "toricpo/scan.hpp"

using namespace toricpo;
using io::json;

namespace {

constexpr int exit_validation = 2;
constexpr int exit_numerical = 3;

struct Inputs {
    std::string catalog;
    std::string polytope_file;
    std::string config_file;
    std::string truncation;
    double eps_c = 0, eps_s = 0, tol_abs = 0;
    bool assume_fano = false;
    std::string format;
    int jobs = 0;
    CLI::App* app = nullptr;
};

struct Source {
    MomentPolytope polytope;
    std::vector<Correction> corrections;
    bool corrections_known = true;
    std::string label;
};

void add_common(CLI::App* sub, Inputs& in, bool needs_polytope = true) {
    in.app = sub;
    if (needs_polytope) {
        sub->add_option("--catalog", in.catalog, "catalog entry, e.g. blowup1:1/3");
        sub->add_option("--polytope", in.polytope_file, "polytope JSON file");
    }
    sub->add_option("--config", in.config_file, "config JSON (default: $TORICPO_CONFIG)");
    sub->add_option("--truncation", in.truncation, "truncation order E (p/q or decimal)");
    sub->add_option("--eps-c", in.eps_c, "coefficient zero threshold");
    sub->add_option("--eps-s", in.eps_s, "root deduplication tolerance");
    sub->add_option("--tol-abs", in.tol_abs, "zero acceptance for residue checks");
    sub->add_flag("--assume-fano", in.assume_fano, "use PO_0 only without noting missing corrections");
    sub->add_option("--format", in.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--jobs", in.jobs, "worker threads");
}

RunConfig resolve_config(const Inputs& in, const std::string& default_format) {
    RunConfig c = in.config_file.empty() ? default_config() : load_config(in.config_file);
    auto given = [&](const char* name) { return in.app->count(name) > 0; };
    if (given("--truncation")) c.truncation = parse_rational(in.truncation);
    if (given("--eps-c")) c.eps_c = in.eps_c;
    if (given("--eps-s")) c.eps_s = in.eps_s;
    if (given("--tol-abs")) c.tol_abs = in.tol_abs;
    if (given("--assume-fano")) c.assume_fano = true;
    if (given("--jobs")) c.jobs = in.jobs;
    if (given("--format")) c.format = in.format;
    if (c.format.empty()) c.format = default_format;
    validate(c);
    set_coefficient_epsilon(c.eps_c);
    return c;
}

Source load_source(const Inputs& in) {
    bool cat = !in.catalog.empty(), file = !in.polytope_file.empty();
    if (cat == file) throw Error(ErrorCode::ParamOutOfRange, "give exactly one of --catalog and --polytope");
    Source s;
    if (cat) {
        auto e = catalog(in.catalog);
        s.polytope = std::move(e.polytope);
        s.corrections = std::move(e.corrections);
        s.corrections_known = e.corrections_known;
        s.label = e.spec;
    } else {
        auto d = io::load_polytope(in.polytope_file);
        s.polytope = std::move(d.polytope);
        s.corrections = std::move(d.corrections);
        s.label = in.polytope_file;
    }
    require_valid(s.polytope);
    return s;
}

Potential make_potential(const Source& s, const RunConfig& c) {
    PotentialOptions opt;
    opt.assume_fano = c.assume_fano;
    opt.corrections_supplied = !s.corrections.empty() || (s.corrections_known && fano_check(s.polytope) == FanoType::fano);
    Potential w = build_potential(s.polytope, {}, s.corrections, opt);
    for (auto& note : w.dropped_corrections(c.truncation)) w.add_note(note);
    return w;
}

json header(const Source& s, const RunConfig& c) {
    return json{{"input", s.label}, {"config", config_json(c)}};
}

void emit(const json& j) { std::cout << io::dump(j); }

std::string lead(const NovikovScalar& s) {
    if (s.is_zero()) return "0";
    const auto& t = s.terms().front();
    std::ostringstream os;
    os << detail::format_complex(t.coeff);
    if (t.exponent != 0) os << " T^" << detail::format_exponent(t.exponent);
    return os.str();
}

std::string optional_complex(const std::optional<Complex>& c) { return c ? detail::format_complex(*c) : "free"; }

std::string solution_str(const LTESolution& s) {
    std::string out = "(";
    for (std::size_t i = 0; i < s.ybar.size(); ++i) out += (i ? ", " : "") + optional_complex(s.ybar[i]);
    return out + ")";
}

// ---------------------------------------------------------------- subcommands

int cmd_catalog_list(const Inputs& in) {
    RunConfig c = resolve_config(in, "text");
    auto list = catalog_list();
    if (c.format == "json") {
        json a = json::array();
        for (const auto& e : list) a.push_back(json{{"name", e.name}, {"params", e.params}, {"description", e.description}});
        emit(json{{"catalog", std::move(a)}});
        return 0;
    }
    for (const auto& e : list) std::cout << std::left << std::setw(12) << e.name << std::setw(8) << e.params << e.description << "\n";
    return 0;
}

int cmd_potential(const Inputs& in, const std::string& u_text) {
    RunConfig c = resolve_config(in, "text");
    Source s = load_source(in);
    Potential w = make_potential(s, c);
    LaurentPoly f = w.polynomial(c.truncation);
    std::optional<RationalVector> u;
    if (!u_text.empty()) {
        u = parse_rational_list(u_text);
        if (u->size() != static_cast<std::size_t>(s.polytope.dim())) throw Error(ErrorCode::IndexOutOfRange, "--u needs one entry per coordinate");
        if (!s.polytope.contains(*u)) throw Error(ErrorCode::OutsideDomain, detail::point_str(*u) + " is outside P");
    }
    if (c.format == "json") {
        json terms = json::array();
        for (const auto& [a, coeff] : f.terms()) terms.push_back(json{{"exponent", a}, {"coeff", io::scalar(coeff)}});
        json j = header(s, c);
        j["polytope"] = io::polytope(s.polytope, s.corrections);
        j["fano"] = std::string(to_string(fano_check(s.polytope)));
        j["potential"] = w.str();
        j["terms"] = std::move(terms);
        if (u) {
            j["u"] = io::rationals(*u);
            j["ybar_frame"] = f.change_frame(*u).str("ybar");
        }
        j["notes"] = w.notes();
        emit(j);
        return 0;
    }
    std::cout << w.str() << "\n";
    if (u) std::cout << "at u = " << detail::point_str(*u) << ": " << f.change_frame(*u).str("ybar") << "\n";
    for (const auto& n : w.notes()) std::cout << "# " << n << "\n";
    return 0;
}

void print_points(const CriticalAnalysis& a) {
    std::cout << a.points.size() << " critical point(s), multiplicity total " << a.multiplicity_total() << "\n";
    for (std::size_t k = 0; k < a.points.size(); ++k) {
        const auto& p = a.points[k];
        std::cout << "  [" << k << "] u = " << detail::point_str(p.u) << "  ybar0 = (";
        for (std::size_t i = 0; i < p.initial.size(); ++i) std::cout << (i ? ", " : "") << detail::format_complex(p.initial[i]);
        std::cout << ")  mult = " << (p.multiplicity ? std::to_string(*p.multiplicity) : "?") << "  residual v = "
                  << p.residual_valuation.str() << "  (" << p.method << ")\n";
    }
    for (const auto& n : a.notes) std::cout << "# " << n << "\n";
}

int cmd_critical_points(const Inputs& in) {
    RunConfig c = resolve_config(in, "json");
    Source s = load_source(in);
    Potential w = make_potential(s, c);
    auto a = find_critical_points(w, c.critical());
    if (c.format == "json") {
        json j = header(s, c);
        j["potential"] = w.str();
        j["analysis"] = io::analysis(a);
        j["notes"] = w.notes();
        emit(j);
        return 0;
    }
    std::cout << "PO = " << w.str() << "\n";
    print_points(a);
    return 0;
}

struct GridArgs {
    int k = 0;
    std::string origin, step;
};

int cmd_lte(const Inputs& in, const std::string& u_text, const GridArgs& grid) {
    RunConfig c = resolve_config(in, "json");
    Source s = load_source(in);
    if (!u_text.empty() && grid.k != 0) throw Error(ErrorCode::ParamOutOfRange, "give at most one of --u and --grid");
    std::string note = fano_check(s.polytope) == FanoType::fano ? "" : "PO_0-level verdict (P is not Fano)";

    if (!u_text.empty()) {
        RationalVector u = parse_rational_list(u_text);
        auto sys = leading_term_system(s.polytope, u);
        auto v = is_strongly_bulk_balanced(s.polytope, u, {}, c.lte());
        if (c.format == "json") {
            json j = header(s, c);
            j["verdict"] = io::verdict(u, v);
            j["system"] = io::lte_system(sys);
            emit(j);
            return 0;
        }
        std::cout << "u = " << detail::point_str(u) << ": " << (v.balanced ? "true" : "false") << "\n";
        for (std::size_t k = 0; k < sys.equations.size(); ++k)
            std::cout << "  level " << sys.equation_level[k] + 1 << ": 0 = " << sys.equations[k].str("Y") << "\n";
        for (const auto& sol : v.solutions) std::cout << "  ybar = " << solution_str(sol) << "\n";
        if (v.obstruction_level) std::cout << "  no solution at level " << *v.obstruction_level + 1 << "\n";
        if (!v.note.empty()) std::cout << "# " << v.note << "\n";
        return 0;
    }

    GridSpec g = default_grid(s.polytope, grid.k ? grid.k : c.grid);
    if (!grid.origin.empty()) g.origin = parse_rational_list(grid.origin);
    if (!grid.step.empty()) g.step = parse_rational_list(grid.step);
    auto pts = grid_points(s.polytope, g);
    auto scan = lte_scan(s.polytope, pts, {}, c.lte(), c.jobs);
    std::size_t balanced = 0, undecided = 0;
    for (const auto& e : scan) {
        balanced += e.error.empty() && e.verdict.balanced;
        undecided += !e.error.empty();
    }
    if (c.format == "json") {
        json entries = json::array();
        for (const auto& e : scan) {
            json x{{"u", io::rationals(e.u)}, {"balanced", e.error.empty() ? json(e.verdict.balanced) : json(nullptr)}};
            if (!e.error.empty()) x["error"] = e.error;
            entries.push_back(std::move(x));
        }
        json j = header(s, c);
        j["grid"] = json{{"origin", io::rationals(g.origin)}, {"step", io::rationals(g.step)}, {"k", g.k}};
        j["scanned"] = scan.size();
        j["balanced"] = balanced;
        j["undecided"] = undecided;
        j["points"] = std::move(entries);
        j["note"] = note;
        emit(j);
        return 0;
    }
    std::cout << scan.size() << " interior grid points, " << balanced << " balanced, " << undecided << " undecided\n";
    for (const auto& e : scan) {
        if (!e.error.empty()) std::cout << "  " << detail::point_str(e.u) << ": " << e.error << "\n";
        else if (e.verdict.balanced) std::cout << "  " << detail::point_str(e.u) << ": true\n";
    }
    if (!note.empty()) std::cout << "# " << note << "\n";
    return 0;
}

int cmd_residue_check(const Inputs& in, bool require_morse) {
    RunConfig c = resolve_config(in, "json");
    Source s = load_source(in);
    Potential w = make_potential(s, c);
    auto a = find_critical_points(w, c.critical());
    if (require_morse) residue_pairing(w.polynomial(c.truncation), a.points, c.truncation);
    auto r = residue_report(w, a, c.residue());
    if (c.format == "json") {
        json j = header(s, c);
        j["potential"] = w.str();
        j["residue"] = io::residue(r);
        emit(j);
        return 0;
    }
    std::cout << "regime: " << r.regime << "\n";
    std::cout << "count: " << r.count.verdict << " (" << r.count.points << " points, " << r.count.count_with_multiplicity
              << " with multiplicity, Betti sum " << r.count.betti << ")\n";
    std::cout << std::left << std::setw(4) << "#" << std::setw(16) << "u" << std::setw(28) << "Z" << std::setw(28) << "1/Z"
              << "critical value\n";
    for (std::size_t k = 0; k < r.points.size(); ++k) {
        const auto& p = r.points[k];
        std::cout << std::setw(4) << k << std::setw(16) << detail::point_str(a.points[k].u) << std::setw(28)
                  << (p.Z ? lead(*p.Z) : "-") << std::setw(28) << (p.pairing_diag ? lead(*p.pairing_diag) : "-")
                  << lead(p.critical_value) << "\n";
    }
    if (r.trace_sum)
        std::cout << "trace sum 1/Z: " << r.trace_sum->str() << (r.trace_vanishes ? "  (vanishes" : "  (does not vanish")
                  << ", tol " << r.trace_tol << ")\n";
    for (const auto& n : r.notes) std::cout << "# " << n << "\n";
    return 0;
}

int cmd_betti(const Inputs& in) {
    RunConfig c = resolve_config(in, "text");
    Source s = load_source(in);
    auto vs = vertices(s.polytope);
    if (c.format == "json") {
        json pts = json::array();
        for (const auto& v : vs) pts.push_back(io::rationals(v.point));
        json j = header(s, c);
        j["betti"] = vs.size();
        j["vertices"] = std::move(pts);
        emit(j);
        return 0;
    }
    std::cout << vs.size() << "\n";
    return 0;
}

int cmd_analyze(const Inputs& in) {
    RunConfig c = resolve_config(in, "json");
    Source s = load_source(in);
    Potential w = make_potential(s, c);
    auto a = find_critical_points(w, c.critical());
    auto r = residue_report(w, a, c.residue());
    std::set<RationalVector> us;
    for (const auto& p : a.points)
        if (s.polytope.is_interior(p.u)) us.insert(p.u);
    std::vector<std::pair<RationalVector, BalanceVerdict>> verdicts;
    for (const auto& u : us) verdicts.emplace_back(u, is_strongly_bulk_balanced(s.polytope, u, {}, c.lte()));

    if (c.format == "json") {
        json lte = json::array();
        for (const auto& [u, v] : verdicts) lte.push_back(io::verdict(u, v));
        json j = header(s, c);
        j["polytope"] = io::polytope(s.polytope, s.corrections);
        j["fano"] = std::string(to_string(fano_check(s.polytope)));
        j["betti"] = total_betti(s.polytope);
        j["potential"] = w.str();
        j["analysis"] = io::analysis(a);
        j["lte"] = std::move(lte);
        j["residue"] = io::residue(r);
        j["notes"] = w.notes();
        emit(j);
        return 0;
    }
    std::cout << "input: " << s.label << "  (" << to_string(fano_check(s.polytope)) << ", Betti sum " << total_betti(s.polytope) << ")\n";
    std::cout << "PO = " << w.str() << "\n";
    for (const auto& n : w.notes()) std::cout << "# " << n << "\n";
    print_points(a);
    for (const auto& [u, v] : verdicts)
        std::cout << "leading term equation at " << detail::point_str(u) << ": " << (v.balanced ? "solvable" : "unsolvable") << "\n";
    std::cout << "Morse count: " << r.count.verdict << ", regime " << r.regime;
    if (r.trace_sum) std::cout << ", trace sum " << (r.trace_vanishes ? "vanishes" : "does not vanish");
    std::cout << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Floer potentials and critical points of toric manifolds"};
    app.require_subcommand(1);

    Inputs analyze_in, potential_in, crit_in, lte_in, res_in, betti_in, list_in;
    std::string potential_u, lte_u;
    GridArgs grid;
    bool require_morse = false;

    auto* analyze = app.add_subcommand("analyze", "full pipeline report");
    add_common(analyze, analyze_in);
    auto* potential = app.add_subcommand("potential", "print the potential function");
    add_common(potential, potential_in);
    potential->add_option("--u", potential_u, "also print PO in the ybar frame at u");
    auto* crit = app.add_subcommand("critical-points", "critical points over the Novikov field");
    add_common(crit, crit_in);
    auto* lte = app.add_subcommand("lte", "leading term equation verdicts");
    add_common(lte, lte_in);
    lte->add_option("--u", lte_u, "interior point, e.g. \"1/3,1/3\"");
    lte->add_option("--grid", grid.k, "scan k points per axis")->check(CLI::PositiveNumber);
    lte->add_option("--grid-origin", grid.origin, "grid origin (default: lower corner of the bounding box)");
    lte->add_option("--grid-step", grid.step, "grid step per axis (default: box width / (k+1))");
    auto* res = app.add_subcommand("residue-check", "Hessians, Z, residue pairing and trace identity");
    add_common(res, res_in);
    res->add_flag("--require-morse", require_morse, "fail when some critical point is degenerate");
    auto* betti = app.add_subcommand("betti", "total Betti number (vertex count)");
    add_common(betti, betti_in);
    auto* list = app.add_subcommand("catalog-list", "list catalog entries");
    add_common(list, list_in, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_validation;
    }

    try {
        if (*analyze) return cmd_analyze(analyze_in);
        if (*potential) return cmd_potential(potential_in, potential_u);
        if (*crit) return cmd_critical_points(crit_in);
        if (*lte) return cmd_lte(lte_in, lte_u, grid);
        if (*res) return cmd_residue_check(res_in, require_morse);
        if (*betti) return cmd_betti(betti_in);
        if (*list) return cmd_catalog_list(list_in);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.is_numerical() ? exit_numerical : exit_validation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_validation;
    }
    return 0;
}
