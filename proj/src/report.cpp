#include "msequiv/report.hpp"

#include "msequiv/expr.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

namespace msequiv {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot read '" + path.string() + "'");
    }
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    return std::string("fnv1a64:") + hex;
}

void RunReport::add_input(std::string role, const std::filesystem::path& path) {
    inputs.push_back({std::move(role), path.string(), file_digest(path)});
}

json to_json(const RunReport& r) {
    json inputs = json::array();
    for (const auto& i : r.inputs) {
        inputs.push_back({{"role", i.role}, {"path", i.path}, {"digest", i.digest}});
    }
    return {{"schema", kReportSchema},
            {"version", kReportVersion},
            {"command", r.command},
            {"inputs", inputs},
            {"results", r.results},
            {"warnings", r.warnings},
            {"exit_status", r.exit_status}};
}

void write_report(const RunReport& report, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write '" + path.string() + "'");
    }
    out << to_json(report).dump(2) << '\n';
}

namespace {

json vec(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

json to_json(const SteadyState& s) {
    json ev = json::array();
    for (const auto& l : s.eigenvalues) {
        ev.push_back({l.real(), l.imag()});
    }
    return {{"x", vec(s.x)},
            {"residual", s.residual},
            {"eigenvalues", ev},
            {"unstable_count", s.unstable_count},
            {"imaginary_axis", s.imaginary_axis}};
}

json to_json(const TubeReport& t) {
    return {{"eps", t.eps},
            {"deviation", t.deviation},
            {"within_tube", t.within_tube},
            {"winding_low", t.winding_low},
            {"winding_high", t.winding_high},
            {"samples", t.samples}};
}

json to_json(const NyquistCurve& c) {
    return {{"winding", c.winding},
            {"unstable_count", unstable_count_from_winding(c)},
            {"min_distance", c.min_distance},
            {"omega_max", c.omega_max},
            {"samples", c.omega.size()}};
}

json to_json(const EquivalenceReport& r) {
    json mism = json::array();
    for (const auto& m : r.sign_mismatches) {
        mism.push_back({{"row", m.row + 1}, {"col", m.col + 1}, {"expected", m.expected},
                        {"observed", m.observed}, {"point", m.point}});
    }
    json pairs = json::array();
    for (const auto& p : r.pairs) {
        json e = {{"z", vec(p.z)},
                  {"x", vec(p.x)},
                  {"low_residual", p.low_residual},
                  {"lift_residual", p.lift_residual},
                  {"low_unstable", p.low_unstable},
                  {"high_unstable", p.high_unstable},
                  {"imaginary_axis", p.imaginary_axis},
                  {"ok", p.ok}};
        if (p.nyquist) {
            e["nyquist"] = to_json(*p.nyquist);
        }
        if (!p.nyquist_error.empty()) {
            e["nyquist_error"] = p.nyquist_error;
        }
        pairs.push_back(e);
    }
    json inconclusive = json::array();
    for (auto k : r.inconclusive) {
        inconclusive.push_back(k + 1);
    }
    return {{"sign_check", r.sign_check},
            {"sign_points", r.sign_points},
            {"sign_mismatches", mism},
            {"lift_check", r.lift_check},
            {"injective", r.injective},
            {"low_states", r.low_states},
            {"high_states", r.high_states},
            {"unmatched_high_states", r.unmatched_high_states},
            {"bijection", r.bijection},
            {"stability_check", r.stability_check},
            {"pairs", pairs},
            {"inconclusive", inconclusive},
            {"verdict", r.verdict}};
}

json to_json(const Branch& b) {
    json folds = json::array();
    for (const auto& f : b.folds) {
        folds.push_back({{"param", f.p}, {"x", vec(f.x)}, {"unstable_before", f.unstable_before},
                         {"unstable_after", f.unstable_after}});
    }
    json other = json::array();
    for (const auto& f : b.other) {
        other.push_back({{"param", f.p}, {"x", vec(f.x)}, {"unstable_before", f.unstable_before},
                         {"unstable_after", f.unstable_after}});
    }
    json out = {{"parameter", b.parameter},
                {"points", b.points.size()},
                {"folds", folds},
                {"other_bifurcations", other},
                {"stop_reason", b.stop_reason}};
    if (!b.points.empty()) {
        out["start"] = {{"param", b.points.front().p}, {"x", vec(b.points.front().x)}};
        out["end"] = {{"param", b.points.back().p}, {"x", vec(b.points.back().x)}};
    }
    return out;
}

json to_json(const Trajectory& t) {
    return {{"samples", t.t.size()},
            {"t_end", t.t.empty() ? 0.0 : t.t.back()},
            {"final_state", t.t.empty() ? json::array() : vec(t.final_state())},
            {"steps", t.steps},
            {"rejections", t.rejections},
            {"evaluations", t.evaluations},
            {"clamps", t.clamps}};
}

json to_json(const ConsistencyReport& r) {
    json witnesses = json::array();
    for (const auto& w : r.witnesses) {
        std::vector<std::size_t> path;
        for (auto v : w.path) {
            path.push_back(v + 1);
        }
        witnesses.push_back({{"target", w.target + 1}, {"source", w.source + 1},
                             {"required_sign", w.required_sign}, {"path", path}});
    }
    json violations = json::array();
    for (const auto& v : r.violations) {
        violations.push_back({{"target", v.target + 1}, {"source", v.source + 1}, {"via", v.via + 1},
                              {"clause", v.clause}, {"detail", v.detail}});
    }
    return {{"interpretation", r.interpretation},
            {"consistent", r.consistent()},
            {"witnesses", witnesses},
            {"violations", violations},
            {"warnings", r.warnings}};
}

json to_json(const ParameterChoice& c) {
    json tubes = json::array();
    for (const auto& t : c.tubes) {
        tubes.push_back(to_json(t));
    }
    return {{"rates", c.rates},      {"eps", c.eps},   {"scale", c.scale},
            {"eps_halvings", c.eps_halvings}, {"tubes", tubes}, {"log", c.log}};
}

namespace {

void header(std::ostream& out, const std::vector<std::string>& cols) {
    for (std::size_t k = 0; k < cols.size(); ++k) {
        out << (k ? "," : "") << cols[k];
    }
    out << '\n';
}

void row(std::ostream& out, const Vector& v) {
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        out << ',' << format_number(v[k]);
    }
}

}  // namespace

void write_steady_states_csv(std::ostream& out, const std::vector<SteadyState>& states,
                             const std::vector<std::string>& names) {
    std::vector<std::string> cols{"index", "unstable_count", "residual"};
    cols.insert(cols.end(), names.begin(), names.end());
    for (std::size_t k = 0; k < names.size(); ++k) {
        cols.push_back("re_lambda" + std::to_string(k + 1));
    }
    for (std::size_t k = 0; k < names.size(); ++k) {
        cols.push_back("im_lambda" + std::to_string(k + 1));
    }
    header(out, cols);
    for (std::size_t r = 0; r < states.size(); ++r) {
        const auto& s = states[r];
        out << r + 1 << ',' << s.unstable_count << ',' << format_number(s.residual);
        row(out, s.x);
        row(out, s.eigenvalues.real());
        row(out, s.eigenvalues.imag());
        out << '\n';
    }
}

void write_nyquist_csv(std::ostream& out, const NyquistCurve& curve) {
    header(out, {"omega", "re", "im"});
    for (std::size_t k = 0; k < curve.omega.size(); ++k) {
        out << format_number(curve.omega[k]) << ',' << format_number(curve.value[k].real()) << ','
            << format_number(curve.value[k].imag()) << '\n';
    }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& tr, const std::vector<std::string>& names) {
    std::vector<std::string> cols{"t"};
    cols.insert(cols.end(), names.begin(), names.end());
    header(out, cols);
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        out << format_number(tr.t[k]);
        row(out, tr.states.row(static_cast<Eigen::Index>(k)).transpose());
        out << '\n';
    }
}

void write_branch_csv(std::ostream& out, const Branch& b, const std::vector<std::string>& names) {
    std::vector<std::string> cols{"param"};
    cols.insert(cols.end(), names.begin(), names.end());
    cols.push_back("unstable_count");
    cols.push_back("leading_re");
    header(out, cols);
    for (const auto& p : b.points) {
        out << format_number(p.p);
        row(out, p.x);
        out << ',' << p.unstable_count << ',' << format_number(p.leading_re) << '\n';
    }
}

}  // namespace msequiv
