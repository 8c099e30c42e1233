#include "msequiv/analysis.hpp"
#include "msequiv/construction.hpp"
#include "msequiv/continuation.hpp"
#include "msequiv/dynamics.hpp"
#include "msequiv/equivalence.hpp"
#include "msequiv/frequency.hpp"
#include "msequiv/model.hpp"
#include "msequiv/msc.hpp"
#include "msequiv/report.hpp"
#include "msequiv/structure.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace msequiv;

namespace {

SignMatrix to_sign_matrix(const std::vector<std::vector<int>>& rows) { return SignMatrix(rows); }

std::vector<std::vector<int>> from_sign_matrix(const SignMatrix& s) {
    std::vector<std::vector<int>> out(s.rows(), std::vector<int>(s.cols()));
    for (std::size_t i = 0; i < s.rows(); ++i) {
        for (std::size_t j = 0; j < s.cols(); ++j) {
            out[i][j] = s(i, j);
        }
    }
    return out;
}

ModelSpec with_values(ModelSpec spec, const std::map<std::string, double>& values) {
    for (const auto& [name, v] : values) {
        spec.set_parameter(name, v);
    }
    return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multistability-equivalent model construction and verification";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<ModelSpec>(m, "Model")
        .def_readonly("name", &ModelSpec::name)
        .def_readonly("variables", &ModelSpec::variables)
        .def_readonly("degradation", &ModelSpec::degradation)
        .def_property_readonly("dimension", &ModelSpec::dimension)
        .def_property_readonly("parameters",
                               [](const ModelSpec& s) {
                                   std::map<std::string, double> out;
                                   for (const auto& p : s.parameters) {
                                       out[p.name] = p.value;
                                   }
                                   return out;
                               })
        .def_property_readonly("interactions",
                               [](const ModelSpec& s) {
                                   std::vector<std::string> out;
                                   for (std::size_t i = 0; i < s.dimension(); ++i) {
                                       out.push_back(s.interaction_text(i));
                                   }
                                   return out;
                               })
        .def_property_readonly("constructed", [](const ModelSpec& s) { return s.construction.has_value(); })
        .def("with_parameters", &with_values, py::arg("values"))
        .def("to_json", [](const ModelSpec& s) { return to_json(s).dump(); })
        .def("save", [](const ModelSpec& s, const std::string& path) { save_model(s, path); })
        .def("rhs", [](const ModelSpec& s, const Vector& x) { return OdeSystem(s).rhs(x); })
        .def("jacobian", [](const ModelSpec& s, const Vector& x) { return OdeSystem(s).jacobian(x); })
        .def("__eq__", [](const ModelSpec& a, const ModelSpec& b) { return a == b; });

    m.def("load_model", [](const std::string& path) { return load_model(path); });
    m.def("model_from_json", [](const std::string& text) { return model_from_json(nlohmann::json::parse(text)); });
    m.def("load_sign_matrix", [](const std::string& path) { return from_sign_matrix(load_sign_matrix(path)); });

    m.def("msc_low_dim", &msc::low_dim);
    m.def("msc_sign_matrix", [] { return from_sign_matrix(msc::sign_matrix()); });
    m.def("msc_default_rates", &msc::default_rates);

    m.def(
        "check_structure",
        [](const std::vector<std::vector<int>>& sa_high, std::size_t masters) {
            const auto a = check_modular_structure(to_sign_matrix(sa_high), masters);
            std::vector<std::vector<std::size_t>> modules;
            for (const auto& mod : a.modules) {
                std::vector<std::size_t> genes;
                for (auto g : mod) {
                    genes.push_back(g + 1);
                }
                modules.push_back(genes);
            }
            return modules;
        },
        py::arg("sign_matrix"), py::arg("masters"));

    m.def(
        "construct",
        [](const ModelSpec& low, const std::vector<std::vector<int>>& sa_high, const std::vector<double>& rates,
           const std::vector<double>& eps, bool require_feasible) {
            ConstructionOptions o;
            o.require_feasible = require_feasible;
            const auto h = assemble_high_dim(low, to_sign_matrix(sa_high), rates, eps, o);
            return py::make_tuple(h.spec, h.gains.gamma);
        },
        py::arg("low"), py::arg("sign_matrix"), py::arg("rates"), py::arg("eps"),
        py::arg("require_feasible") = true);

    m.def(
        "steady_states_json",
        [](const ModelSpec& s, std::size_t starts, std::uint64_t seed) {
            nlohmann::json out = nlohmann::json::array();
            for (const auto& st : find_steady_states(OdeSystem(s), {.starts = starts, .seed = seed})) {
                out.push_back(to_json(st));
            }
            return out.dump();
        },
        py::arg("model"), py::arg("starts") = 2000, py::arg("seed") = 0);

    m.def(
        "equivalence_json",
        [](const ModelSpec& low, const ModelSpec& high, bool nyquist, std::uint64_t seed) {
            EquivalenceOptions o;
            o.nyquist = nyquist;
            o.steady.seed = seed;
            return to_json(check_equivalence(OdeSystem(low), OdeSystem(high), o)).dump();
        },
        py::arg("low"), py::arg("high"), py::arg("nyquist") = true, py::arg("seed") = 0);

    m.def(
        "nyquist",
        [](const ModelSpec& s, const Vector& x, double omega_max) {
            NyquistOptions o;
            o.omega_max = omega_max;
            const auto c = nyquist_curve(loopbreak(OdeSystem(s), x), o);
            return py::dict(py::arg("omega") = c.omega, py::arg("value") = c.value,
                            py::arg("winding") = c.winding, py::arg("min_distance") = c.min_distance,
                            py::arg("unstable_count") = unstable_count_from_winding(c));
        },
        py::arg("model"), py::arg("x"), py::arg("omega_max") = 0.0);

    m.def(
        "simulate",
        [](const ModelSpec& s, const Vector& x0, double t_end, std::size_t samples, double rtol, double atol) {
            IntegrateOptions o;
            o.rtol = rtol;
            o.atol = atol;
            if (samples > 0) {
                o.sample_times = uniform_times(t_end, std::max<std::size_t>(samples, 2));
            }
            const auto tr = integrate(OdeSystem(s), x0, t_end, o);
            return py::make_tuple(tr.t, tr.states);
        },
        py::arg("model"), py::arg("x0"), py::arg("t_end"), py::arg("samples") = 201, py::arg("rtol") = 1e-8,
        py::arg("atol") = 1e-10);

    m.def(
        "continue_branch",
        [](const ModelSpec& s, const std::string& param, double p_from, double p_to, const Vector& seed) {
            const auto b = continue_branch(OdeSystem(s), param, p_from, p_to, seed);
            std::vector<double> p;
            std::vector<int> unstable;
            Matrix x(static_cast<Eigen::Index>(b.points.size()), static_cast<Eigen::Index>(s.dimension()));
            for (std::size_t k = 0; k < b.points.size(); ++k) {
                p.push_back(b.points[k].p);
                unstable.push_back(b.points[k].unstable_count);
                x.row(static_cast<Eigen::Index>(k)) = b.points[k].x.transpose();
            }
            std::vector<double> folds;
            for (const auto& f : b.folds) {
                folds.push_back(f.p);
            }
            return py::dict(py::arg("param") = p, py::arg("x") = x, py::arg("unstable_count") = unstable,
                            py::arg("folds") = folds, py::arg("stop_reason") = b.stop_reason);
        },
        py::arg("model"), py::arg("param"), py::arg("p_from"), py::arg("p_to"), py::arg("seed"));
}
