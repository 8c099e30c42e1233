#include "msequiv/analysis.hpp"
#include "msequiv/construction.hpp"
#include "msequiv/continuation.hpp"
#include "msequiv/dynamics.hpp"
#include "msequiv/equivalence.hpp"
#include "msequiv/expr.hpp"
#include "msequiv/frequency.hpp"
#include "msequiv/model.hpp"
#include "msequiv/parameter_search.hpp"
#include "msequiv/report.hpp"
#include "msequiv/structure.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

using namespace msequiv;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kVerificationFailed = 1;
constexpr int kUsage = 2;

struct Common {
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    std::string report;
};

/// "name=value" overrides applied to every loaded model.
ModelSpec load_with_overrides(const fs::path& path, const std::vector<std::string>& sets) {
    ModelSpec spec = load_model(path);
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw InputError("--set expects name=value, got '" + s + "'");
        }
        double v = 0.0;
        try {
            std::size_t used = 0;
            v = std::stod(s.substr(eq + 1), &used);
            if (used != s.size() - eq - 1) {
                throw std::invalid_argument(s);
            }
        } catch (const std::logic_error&) {
            throw InputError("--set value is not a number in '" + s + "'");
        }
        spec.set_parameter(s.substr(0, eq), v);
    }
    return spec;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::logic_error&) {
            throw InputError(what + ": '" + item + "' is not a number");
        }
    }
    if (out.empty()) {
        throw InputError(what + " is empty");
    }
    return out;
}

/// Writes CSV to `path`, or to stdout when the path is empty or "-".
template <class F>
void emit_csv(const std::string& path, F&& writer) {
    if (path.empty() || path == "-") {
        writer(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write '" + path + "'");
    }
    writer(out);
}

void finish(RunReport& report, const Common& common, int status) {
    report.exit_status = status;
    fs::path target = common.report;
    if (target.empty()) {
        if (const char* dir = std::getenv("MSEQUIV_REPORT_DIR"); dir && *dir) {
            target = fs::path(dir) / (report.command + ".json");
        }
    }
    if (!target.empty()) {
        write_report(report, target);
    }
    for (const auto& w : report.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
}

std::vector<std::string> names_of(const ModelSpec& s) { return s.variables; }

// --- commands ---------------------------------------------------------------

struct CheckArgs {
    std::string model, matrix;
};

int run_check(const CheckArgs& a, const Common& c, RunReport& report) {
    const ModelSpec low = load_with_overrides(a.model, c.sets);
    const SignMatrix sa_high = load_sign_matrix(a.matrix);
    report.add_input("model", a.model);
    report.add_input("sign_matrix", a.matrix);
    const std::size_t n = low.dimension();
    if (n > sa_high.rows()) {
        throw InputError("model has " + std::to_string(n) + " genes but the sign matrix only " +
                         std::to_string(sa_high.rows()));
    }
    const auto violations = modular_structure_violations(sa_high, n);
    nlohmann::json listed = nlohmann::json::array();
    for (const auto& x : violations) {
        listed.push_back({{"row", x.row + 1}, {"col", x.col + 1}, {"entry", x.entry}, {"clause", x.clause}});
    }
    report.results["structure"] = {{"masters", n}, {"genes", sa_high.rows()}, {"violations", listed}};
    if (!violations.empty()) {
        std::cout << "modular structure: FAIL (" << violations.size() << " violations)\n";
        for (const auto& x : violations) {
            std::cout << "  S(" << x.row + 1 << "," << x.col + 1 << ") = " << x.entry << ": " << x.clause
                      << '\n';
        }
        return kVerificationFailed;
    }
    const auto assignment = check_modular_structure(sa_high, n);
    nlohmann::json modules = nlohmann::json::array();
    for (const auto& m : assignment.modules) {
        std::vector<std::size_t> genes;
        for (auto g : m) {
            genes.push_back(g + 1);
        }
        modules.push_back(genes);
    }
    report.results["structure"]["modules"] = modules;
    const SignMatrix sa_low = derive_sign_matrix(OdeSystem(low), 256, c.seed);
    const auto consistency = check_sign_consistency(sa_low, sa_high, assignment);
    report.results["consistency"] = to_json(consistency);
    report.warnings.insert(report.warnings.end(), consistency.warnings.begin(), consistency.warnings.end());
    std::cout << "modular structure: PASS\n";
    for (std::size_t k = 0; k < assignment.modules.size(); ++k) {
        std::cout << "  M" << k + 1 << " = {";
        for (std::size_t j = 0; j < assignment.modules[k].size(); ++j) {
            std::cout << (j ? "," : "") << assignment.modules[k][j] + 1;
        }
        std::cout << "}\n";
    }
    std::cout << "sign consistency: " << (consistency.consistent() ? "PASS" : "FAIL") << '\n';
    for (const auto& v : consistency.violations) {
        std::cout << "  " << v.clause << " (" << v.target + 1 << "," << v.source + 1 << "): " << v.detail << '\n';
    }
    return consistency.consistent() ? kOk : kVerificationFailed;
}

struct ConstructArgs {
    std::string model, matrix, out;
    std::string rates, eps;
    bool automatic = false;
    std::string tube = "strict";
};

int run_construct(const ConstructArgs& a, const Common& c, RunReport& report) {
    const ModelSpec low = load_with_overrides(a.model, c.sets);
    const SignMatrix sa_high = load_sign_matrix(a.matrix);
    report.add_input("model", a.model);
    report.add_input("sign_matrix", a.matrix);
    const std::size_t n = low.dimension();
    if (n > sa_high.rows()) {
        throw InputError("model has more genes than the sign matrix");
    }
    std::vector<double> rates, eps;
    std::vector<TubeReport> tubes;
    if (a.automatic) {
        ParameterSearchOptions o;
        if (!a.rates.empty()) {
            o.initial_rates = parse_list(a.rates, "--K");
        }
        if (!a.eps.empty()) {
            o.initial_eps = parse_list(a.eps, "--eps").front();
        }
        o.tube = a.tube == "winding" ? TubePolicy::winding : TubePolicy::strict;
        o.steady.seed = c.seed;
        try {
            const auto choice = choose_parameters(low, sa_high, o);
            report.results["search"] = to_json(choice);
            rates = choice.rates;
            eps = choice.eps;
            tubes = choice.tubes;
        } catch (const SearchExhausted& e) {
            report.results["search"] = {{"exhausted", e.what()}, {"criterion", e.criterion()}, {"log", e.log()}};
            std::cout << "search exhausted: " << e.what() << '\n';
            return kVerificationFailed;
        }
    } else {
        if (a.rates.empty()) {
            throw InputError("--K is required without --auto");
        }
        rates = parse_list(a.rates, "--K");
        eps = a.eps.empty() ? std::vector<double>{1e-3} : parse_list(a.eps, "--eps");
        if (eps.size() == 1) {
            eps.assign(n, eps.front());
        }
    }
    const HighDimModel high = assemble_high_dim(low, sa_high, rates, eps);
    const std::vector<double>& gains = high.gains.gamma;
    report.results["construction"] = {{"rates", rates}, {"eps", eps}, {"gains", gains},
                                      {"genes", high.spec.dimension()}};
    if (!a.out.empty()) {
        save_model(high.spec, a.out);
        report.results["construction"]["output"] = a.out;
    }
    std::cout << "constructed " << high.spec.dimension() << "-gene model";
    if (!a.out.empty()) {
        std::cout << " -> " << a.out;
    }
    std::cout << "\nK =";
    for (double k : rates) {
        std::cout << ' ' << format_number(k);
    }
    std::cout << "\ngains =";
    for (std::size_t i = n; i < gains.size(); ++i) {
        std::cout << ' ' << format_number(gains[i]);
    }
    std::cout << '\n';
    for (std::size_t k = 0; k < tubes.size(); ++k) {
        std::cout << "state " << k + 1 << ": eps " << format_number(tubes[k].eps) << ", deviation "
                  << format_number(tubes[k].deviation) << ", windings " << tubes[k].winding_low << "/"
                  << tubes[k].winding_high << '\n';
    }
    if (a.out.empty()) {
        std::cout << to_json(high.spec).dump(2) << '\n';
    }
    return kOk;
}

struct SteadyArgs {
    std::string model, csv;
    std::size_t starts = 2000;
};

int run_steady(const SteadyArgs& a, const Common& c, RunReport& report) {
    const ModelSpec spec = load_with_overrides(a.model, c.sets);
    report.add_input("model", a.model);
    const auto states = find_steady_states(OdeSystem(spec), {.starts = a.starts, .seed = c.seed});
    nlohmann::json out = nlohmann::json::array();
    for (const auto& s : states) {
        out.push_back(to_json(s));
    }
    report.results["steady_states"] = out;
    for (std::size_t k = 0; k < states.size(); ++k) {
        if (states[k].imaginary_axis) {
            report.warnings.push_back("state " + std::to_string(k + 1) + " has an eigenvalue on the imaginary axis");
        }
    }
    emit_csv(a.csv, [&](std::ostream& o) { write_steady_states_csv(o, states, names_of(spec)); });
    return kOk;
}

struct EquivalenceArgs {
    std::string low, high;
    std::size_t starts = 2000;
    std::size_t sign_samples = 1000;
    bool no_nyquist = false;
};

int run_equivalence(const EquivalenceArgs& a, const Common& c, RunReport& report) {
    const ModelSpec low = load_with_overrides(a.low, c.sets);
    const ModelSpec high = load_with_overrides(a.high, c.sets);
    report.add_input("low_model", a.low);
    report.add_input("high_model", a.high);
    EquivalenceOptions o;
    o.steady.starts = a.starts;
    o.steady.seed = c.seed;
    o.sign_samples = a.sign_samples;
    o.nyquist = !a.no_nyquist;
    const auto r = check_equivalence(OdeSystem(low), OdeSystem(high), o);
    report.results["equivalence"] = to_json(r);
    for (const auto& p : r.pairs) {
        if (!p.nyquist_error.empty()) {
            report.warnings.push_back(p.nyquist_error);
        }
    }
    std::cout << "sign check: " << (r.sign_check ? "PASS" : "FAIL") << " (" << r.sign_points << " points)\n";
    std::cout << "lift check: " << (r.lift_check ? "PASS" : "FAIL") << '\n';
    std::cout << "bijection:  " << (r.bijection ? "PASS" : "FAIL") << " (" << r.low_states << " low, "
              << r.high_states << " high)\n";
    std::cout << "stability:  " << (r.stability_check ? "PASS" : "FAIL") << '\n';
    for (std::size_t k = 0; k < r.pairs.size(); ++k) {
        const auto& p = r.pairs[k];
        std::cout << "  pair " << k + 1 << ": unstable " << p.low_unstable << "/" << p.high_unstable;
        if (p.nyquist) {
            std::cout << ", windings " << p.nyquist->winding_low << "/" << p.nyquist->winding_high
                      << ", eps " << format_number(p.nyquist->eps) << ", deviation "
                      << format_number(p.nyquist->deviation);
        }
        std::cout << '\n';
    }
    std::cout << "verdict: " << (r.verdict ? "equivalent" : "not equivalent") << '\n';
    return r.verdict ? kOk : kVerificationFailed;
}

struct NyquistArgs {
    std::string model, csv;
    std::size_t state_index = 1;
    double omega_max = 0.0;
    std::size_t starts = 2000;
};

int run_nyquist(const NyquistArgs& a, const Common& c, RunReport& report) {
    const ModelSpec spec = load_with_overrides(a.model, c.sets);
    report.add_input("model", a.model);
    const OdeSystem sys(spec);
    const auto states = find_steady_states(sys, {.starts = a.starts, .seed = c.seed});
    if (a.state_index < 1 || a.state_index > states.size()) {
        throw InputError("--state-index " + std::to_string(a.state_index) + " out of range, " +
                         std::to_string(states.size()) + " steady states found");
    }
    const auto& s = states[a.state_index - 1];
    NyquistOptions o;
    o.omega_max = a.omega_max;
    const auto curve = nyquist_curve(loopbreak(sys, s.x), o);
    const int count = unstable_count_from_winding(curve);
    report.results["state"] = to_json(s);
    report.results["nyquist"] = to_json(curve);
    report.results["agrees_with_eigenvalues"] = count == s.unstable_count;
    emit_csv(a.csv, [&](std::ostream& out) { write_nyquist_csv(out, curve); });
    std::cerr << "winding " << curve.winding << ", unstable " << count << " (eigenvalues: "
              << s.unstable_count << ")\n";
    return count == s.unstable_count ? kOk : kVerificationFailed;
}

struct SimulateArgs {
    std::string model, csv, x0;
    double t_end = 200.0;
    std::size_t samples = 201;
    double rtol = 1e-8;
    double atol = 1e-10;
};

int run_simulate(const SimulateArgs& a, const Common& c, RunReport& report) {
    const ModelSpec spec = load_with_overrides(a.model, c.sets);
    report.add_input("model", a.model);
    const auto x0v = parse_list(a.x0, "--x0");
    const Vector x0 = Eigen::Map<const Vector>(x0v.data(), static_cast<Eigen::Index>(x0v.size()));
    IntegrateOptions o;
    o.rtol = a.rtol;
    o.atol = a.atol;
    if (a.samples > 0) {
        o.sample_times = uniform_times(a.t_end, std::max<std::size_t>(a.samples, 2));
    }
    const auto tr = integrate(OdeSystem(spec), x0, a.t_end, o);
    report.results["trajectory"] = to_json(tr);
    if (tr.clamps > 0) {
        report.warnings.push_back(std::to_string(tr.clamps) + " negative components clamped to 0");
    }
    (void)c;
    emit_csv(a.csv, [&](std::ostream& out) { write_trajectory_csv(out, tr, names_of(spec)); });
    return kOk;
}

struct ContinueArgs {
    std::string model, csv, param, range;
    std::size_t from_state = 1;
    std::size_t starts = 2000;
};

int run_continue(const ContinueArgs& a, const Common& c, RunReport& report) {
    const ModelSpec spec = load_with_overrides(a.model, c.sets);
    report.add_input("model", a.model);
    const auto colon = a.range.find(':');
    if (colon == std::string::npos) {
        throw InputError("--range expects from:to, got '" + a.range + "'");
    }
    const double from = parse_list(a.range.substr(0, colon), "--range").front();
    const double to = parse_list(a.range.substr(colon + 1), "--range").front();
    if (!spec.parameter_index(a.param)) {
        throw InputError("unknown parameter '" + a.param + "'");
    }
    const OdeSystem sys = OdeSystem(spec).with_parameter(a.param, from);
    const auto states = find_steady_states(sys, {.starts = a.starts, .seed = c.seed});
    if (a.from_state < 1 || a.from_state > states.size()) {
        throw InputError("--from-state " + std::to_string(a.from_state) + " out of range, " +
                         std::to_string(states.size()) + " steady states found at " + a.param + " = " +
                         format_number(from));
    }
    const auto branch = continue_branch(sys, a.param, from, to, states[a.from_state - 1].x);
    report.results["branch"] = to_json(branch);
    emit_csv(a.csv, [&](std::ostream& out) { write_branch_csv(out, branch, names_of(spec)); });
    std::cerr << branch.points.size() << " points, stop: " << branch.stop_reason << '\n';
    for (const auto& f : branch.folds) {
        std::cerr << "fold at " << a.param << " = " << format_number(f.p) << " (unstable " << f.unstable_before
                  << " -> " << f.unstable_after << ")\n";
    }
    for (const auto& f : branch.other) {
        std::cerr << "other bifurcation at " << a.param << " = " << format_number(f.p) << '\n';
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Construct and verify multistability-equivalent gene regulatory network models"};
    app.require_subcommand(1);
    Common common;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--set", common.sets, "Override a model parameter, name=value (repeatable)");
        sub->add_option("--seed", common.seed, "Seed for all sampling")->capture_default_str();
        sub->add_option("--report", common.report, "Write the JSON run report here");
    };

    CheckArgs check;
    auto* c_check = app.add_subcommand("check", "Check modular structure and sign consistency");
    c_check->add_option("model", check.model, "Low-dimensional model file")->required()->check(CLI::ExistingFile);
    c_check->add_option("sign_matrix", check.matrix, "High-dimensional sign matrix")->required()->check(CLI::ExistingFile);
    add_common(c_check);

    ConstructArgs construct;
    auto* c_construct = app.add_subcommand("construct", "Build the high-dimensional model");
    c_construct->add_option("model", construct.model)->required()->check(CLI::ExistingFile);
    c_construct->add_option("sign_matrix", construct.matrix)->required()->check(CLI::ExistingFile);
    c_construct->add_option("--K", construct.rates, "Module degradation rates, comma separated");
    c_construct->add_option("--eps", construct.eps, "Mixing weights, one value or one per master");
    c_construct->add_flag("--auto", construct.automatic, "Search K and eps");
    c_construct->add_option("--tube", construct.tube, "Acceptance rule for --auto")
        ->check(CLI::IsMember({"strict", "winding"}))
        ->capture_default_str();
    c_construct->add_option("-o,--output", construct.out, "Output model file");
    add_common(c_construct);

    SteadyArgs steady;
    auto* c_steady = app.add_subcommand("steady-states", "Find steady states and their stability");
    c_steady->add_option("model", steady.model)->required()->check(CLI::ExistingFile);
    c_steady->add_option("--starts", steady.starts)->capture_default_str();
    c_steady->add_option("--csv", steady.csv, "CSV output (stdout by default)");
    add_common(c_steady);

    EquivalenceArgs equiv;
    auto* c_equiv = app.add_subcommand("equivalence", "Check multistability equivalence");
    c_equiv->add_option("low", equiv.low)->required()->check(CLI::ExistingFile);
    c_equiv->add_option("high", equiv.high)->required()->check(CLI::ExistingFile);
    c_equiv->add_option("--starts", equiv.starts)->capture_default_str();
    c_equiv->add_option("--sign-samples", equiv.sign_samples)->capture_default_str();
    c_equiv->add_flag("--no-nyquist", equiv.no_nyquist, "Skip the frequency-domain annotation");
    add_common(c_equiv);

    NyquistArgs nyq;
    auto* c_nyq = app.add_subcommand("nyquist", "Nyquist curve of the loopbroken system at a steady state");
    c_nyq->add_option("model", nyq.model)->required()->check(CLI::ExistingFile);
    c_nyq->add_option("--state-index", nyq.state_index, "1-based, in steady-states order")->capture_default_str();
    c_nyq->add_option("--omega-max", nyq.omega_max, "0 picks it automatically")->capture_default_str();
    c_nyq->add_option("--starts", nyq.starts)->capture_default_str();
    c_nyq->add_option("--csv", nyq.csv);
    add_common(c_nyq);

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Integrate the model");
    c_sim->add_option("model", sim.model)->required()->check(CLI::ExistingFile);
    c_sim->add_option("--x0", sim.x0, "Initial state, comma separated")->required();
    c_sim->add_option("--t-end", sim.t_end)->capture_default_str();
    c_sim->add_option("--samples", sim.samples, "Output times; 0 keeps every step")->capture_default_str();
    c_sim->add_option("--rtol", sim.rtol)->capture_default_str();
    c_sim->add_option("--atol", sim.atol)->capture_default_str();
    c_sim->add_option("--csv", sim.csv);
    add_common(c_sim);

    ContinueArgs cont;
    auto* c_cont = app.add_subcommand("continue", "Continue a steady state in one parameter");
    c_cont->add_option("model", cont.model)->required()->check(CLI::ExistingFile);
    c_cont->add_option("--param", cont.param)->required();
    c_cont->add_option("--range", cont.range, "from:to")->required();
    c_cont->add_option("--from-state", cont.from_state, "1-based state at the range start")->capture_default_str();
    c_cont->add_option("--starts", cont.starts)->capture_default_str();
    c_cont->add_option("--csv", cont.csv);
    add_common(c_cont);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    RunReport report;
    report.command = app.get_subcommands().front()->get_name();
    int status = kOk;
    try {
        if (*c_check) {
            status = run_check(check, common, report);
        } else if (*c_construct) {
            status = run_construct(construct, common, report);
        } else if (*c_steady) {
            status = run_steady(steady, common, report);
        } else if (*c_equiv) {
            status = run_equivalence(equiv, common, report);
        } else if (*c_nyq) {
            status = run_nyquist(nyq, common, report);
        } else if (*c_sim) {
            status = run_simulate(sim, common, report);
        } else if (*c_cont) {
            status = run_continue(cont, common, report);
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        report.results["error"] = e.what();
        status = kUsage;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        report.results["error"] = e.what();
        status = kVerificationFailed;
    }
    try {
        finish(report, common, status);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return status;
}
