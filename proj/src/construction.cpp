#include "msequiv/construction.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace msequiv {

namespace {

Eigen::Index ix(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check_rates(const ModuleAssignment& a, std::span<const double> rates) {
    if (rates.size() != a.total - a.masters) {
        throw InputError("expected " + std::to_string(a.total - a.masters) +
                         " module degradation rates, got " + std::to_string(rates.size()));
    }
}

std::size_t position_in_module(const ModuleAssignment& a, std::size_t master, std::size_t gene) {
    const auto& mod = a.modules.at(master);
    for (std::size_t p = 0; p < mod.size(); ++p) {
        if (mod[p] == gene) {
            return p;
        }
    }
    throw InputError("gene " + std::to_string(gene + 1) + " is not in the module of master " +
                     std::to_string(master + 1));
}

}  // namespace

Matrix module_matrix(const SignMatrix& sa_high, const ModuleAssignment& assignment,
                     std::span<const double> rates, std::size_t master) {
    check_rates(assignment, rates);
    const auto& mod = assignment.modules.at(master);
    const std::size_t n = assignment.masters;
    Matrix m(ix(mod.size()), ix(mod.size()));
    for (std::size_t r = 0; r < mod.size(); ++r) {
        for (std::size_t c = 0; c < mod.size(); ++c) {
            m(ix(r), ix(c)) = sa_high(mod[r], mod[c]);
        }
        m(ix(r), ix(r)) -= rates[mod[r] - n];
    }
    return m;
}

Vector module_input(const SignMatrix& sa_high, const ModuleAssignment& assignment,
                    std::size_t master) {
    const auto& mod = assignment.modules.at(master);
    Vector b(ix(mod.size()));
    for (std::size_t r = 0; r < mod.size(); ++r) {
        b[ix(r)] = sa_high(mod[r], master);
    }
    return b;
}

double steady_state_gain(const SignMatrix& sa_high, const ModuleAssignment& assignment,
                         std::span<const double> rates, std::size_t master, std::size_t gene) {
    const std::size_t p = position_in_module(assignment, master, gene);
    const Matrix j = module_matrix(sa_high, assignment, rates, master);
    Eigen::FullPivLU<Matrix> lu(-j);
    if (!lu.isInvertible()) {
        throw InfeasibleGainError("module matrix of master " + std::to_string(master + 1) +
                                  " is singular");
    }
    return lu.solve(module_input(sa_high, assignment, master))[ix(p)];
}

std::complex<double> transfer_gain(const SignMatrix& sa_high, const ModuleAssignment& assignment,
                                   std::span<const double> rates, std::size_t master,
                                   std::size_t gene, std::complex<double> lambda) {
    using CMatrix = Eigen::MatrixXcd;
    const std::size_t p = position_in_module(assignment, master, gene);
    const Matrix j = module_matrix(sa_high, assignment, rates, master);
    CMatrix res = -j.cast<std::complex<double>>();
    res.diagonal().array() += lambda;
    Eigen::FullPivLU<CMatrix> lu(res);
    if (!lu.isInvertible()) {
        throw NumericalError("resolvent of module " + std::to_string(master + 1) +
                             " is singular at the requested lambda");
    }
    const Eigen::VectorXcd b = module_input(sa_high, assignment, master).cast<std::complex<double>>();
    return lu.solve(b)[ix(p)];
}

GainTable compute_gains(const SignMatrix& sa_high, const ModuleAssignment& assignment,
                        std::span<const double> rates, bool require_feasible) {
    check_rates(assignment, rates);
    GainTable g;
    g.gamma.assign(assignment.total, 0.0);
    for (std::size_t k = 0; k < assignment.masters; ++k) {
        g.gamma[k] = 1.0;
    }
    for (std::size_t k = 0; k < assignment.masters; ++k) {
        const auto& mod = assignment.modules[k];
        if (mod.empty()) {
            continue;
        }
        const Matrix j = module_matrix(sa_high, assignment, rates, k);
        Eigen::FullPivLU<Matrix> lu(-j);
        if (!lu.isInvertible()) {
            throw InfeasibleGainError("module matrix of master " + std::to_string(k + 1) +
                                      " is singular; increase K");
        }
        const Vector gamma = lu.solve(module_input(sa_high, assignment, k));
        for (std::size_t r = 0; r < mod.size(); ++r) {
            const double v = gamma[ix(r)];
            if (require_feasible && (!std::isfinite(v) || v < 0.0)) {
                std::ostringstream os;
                os << "negative steady-state gain gamma_" << mod[r] + 1 << "," << k + 1 << " = "
                   << v << "; the module degradation rates K are too small";
                throw InfeasibleGainError(os.str());
            }
            g.gamma[mod[r]] = v;
        }
        if (require_feasible) {
            const Eigen::VectorXcd ev = j.eigenvalues();
            if ((ev.real().array() >= 0.0).any()) {
                throw InfeasibleGainError("module of master " + std::to_string(k + 1) +
                                          " is not Hurwitz; increase K");
            }
        }
    }
    return g;
}

IndexVectors::IndexVectors(std::size_t masters, std::size_t total)
    : n_(masters), total_(total), eq_(masters * masters), neq_(masters * masters) {}

std::vector<int> IndexVectors::eq_dense(std::size_t i, std::size_t nu) const {
    std::vector<int> v(total_, 0);
    for (std::size_t j : eq(i, nu)) {
        v[j] = 1;
    }
    return v;
}

std::vector<int> IndexVectors::neq_dense(std::size_t i, std::size_t nu) const {
    std::vector<int> v(total_, 0);
    for (std::size_t j : neq(i, nu)) {
        v[j] = 1;
    }
    return v;
}

IndexVectors build_index_vectors(const SignMatrix& sa_low, const SignMatrix& sa_high,
                                 const ModuleAssignment& assignment) {
    const std::size_t n = assignment.masters;
    IndexVectors iv(n, assignment.total);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t nu = 0; nu < n; ++nu) {
            const int s = sa_low(i, nu);
            if (s == 0) {
                continue;
            }
            std::vector<std::size_t> candidates{nu};
            candidates.insert(candidates.end(), assignment.modules[nu].begin(),
                              assignment.modules[nu].end());
            for (std::size_t j : candidates) {
                if (sa_high(i, j) == s) {
                    iv.eq(i, nu).push_back(j);
                } else if (sa_high(i, j) == -s) {
                    iv.neq(i, nu).push_back(j);
                }
            }
        }
    }
    return iv;
}

namespace {

void check_eps(std::span<const double> eps, std::size_t n) {
    if (eps.size() != n) {
        throw InputError("expected " + std::to_string(n) + " eps values, got " +
                         std::to_string(eps.size()));
    }
    for (double e : eps) {
        if (!(e > 0.0) || !std::isfinite(e)) {
            throw InputError("eps values must be positive and finite");
        }
    }
}

void require_eq(const IndexVectors& index, std::size_t i, std::size_t nu) {
    if (index.eq(i, nu).empty()) {
        throw InputError("no same-sign input for interaction " + std::to_string(nu + 1) + " -> " +
                         std::to_string(i + 1) + "; the sign matrices are inconsistent");
    }
}

double inverse_gain(const GainTable& gains, std::size_t j) {
    const double g = gains[j];
    if (g == 0.0) {
        throw InputError("gene " + std::to_string(j + 1) +
                         " has zero steady-state gain but is read by a master");
    }
    return 1.0 / g;
}

}  // namespace

Matrix auxiliary_map(const Vector& x, const SignMatrix& sa_low, const GainTable& gains,
                     const IndexVectors& index, std::span<const double> eps) {
    const std::size_t n = index.masters();
    check_eps(eps, n);
    Matrix mu = Matrix::Zero(ix(n), ix(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t nu = 0; nu < n; ++nu) {
            if (sa_low(i, nu) == 0) {
                continue;
            }
            require_eq(index, i, nu);
            const auto& eq = index.eq(i, nu);
            const auto& neq = index.neq(i, nu);
            double s_eq = 0.0;
            double s_neq = 0.0;
            for (std::size_t j : eq) {
                s_eq += inverse_gain(gains, j) * x[ix(j)];
            }
            for (std::size_t j : neq) {
                s_neq += inverse_gain(gains, j) * x[ix(j)];
            }
            const double ne = static_cast<double>(eq.size());
            const double nn = static_cast<double>(neq.size());
            mu(ix(i), ix(nu)) = (1.0 + eps[i] * nn) / ne * s_eq - eps[i] / ne * s_neq;
        }
    }
    return mu;
}

namespace {

Expr scaled_variable(const GainTable& gains, std::size_t j) {
    const double g = gains[j];
    if (g == 0.0) {
        inverse_gain(gains, j);
    }
    if (g == 1.0) {
        return Expr::variable(j);
    }
    return Expr::variable(j) / Expr::constant(g);
}

Expr sum_of(const GainTable& gains, const std::vector<std::size_t>& idx) {
    Expr s = scaled_variable(gains, idx.front());
    for (std::size_t k = 1; k < idx.size(); ++k) {
        s = s + scaled_variable(gains, idx[k]);
    }
    return s;
}

}  // namespace

std::vector<std::vector<Expr>> auxiliary_map_expr(const SignMatrix& sa_low, const GainTable& gains,
                                                  const IndexVectors& index,
                                                  std::span<const double> eps) {
    const std::size_t n = index.masters();
    check_eps(eps, n);
    std::vector<std::vector<Expr>> mu(n, std::vector<Expr>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t nu = 0; nu < n; ++nu) {
            if (sa_low(i, nu) == 0) {
                continue;
            }
            require_eq(index, i, nu);
            const auto& eq = index.eq(i, nu);
            const auto& neq = index.neq(i, nu);
            const double ne = static_cast<double>(eq.size());
            Expr term = sum_of(gains, eq);
            if (neq.empty()) {
                if (eq.size() > 1) {
                    term = term / Expr::constant(ne);
                }
            } else {
                const double nn = static_cast<double>(neq.size());
                term = Expr::constant((1.0 + eps[i] * nn) / ne) * term -
                       Expr::constant(eps[i] / ne) * sum_of(gains, neq);
            }
            mu[i][nu] = std::move(term);
        }
    }
    return mu;
}

Vector lift_state(const Vector& z, const ConstructionInfo& info) {
    const std::size_t total = info.master_of.size();
    if (static_cast<std::size_t>(z.size()) != info.masters) {
        throw InputError("lift expects a state of dimension " + std::to_string(info.masters));
    }
    Vector x = Vector::Zero(ix(total));
    for (std::size_t i = 0; i < total; ++i) {
        if (const auto m = info.master_of[i]) {
            x[ix(i)] = info.lift_gains[i] * z[ix(*m)];
        }
    }
    return x;
}

Vector HighDimModel::lift(const Vector& z) const { return lift_state(z, *spec.construction); }

Matrix HighDimModel::auxiliary(const Vector& x) const {
    return auxiliary_map(x, sa_low, gains, index, eps);
}

HighDimModel assemble_high_dim(const ModelSpec& low, const SignMatrix& sa_high,
                               std::span<const double> rates, std::span<const double> eps,
                               const ConstructionOptions& options) {
    low.validate();
    const std::size_t n = low.dimension();
    if (sa_high.rows() != sa_high.cols() || sa_high.rows() < n) {
        throw InputError("high-dimensional sign matrix must be square with at least " +
                         std::to_string(n) + " rows");
    }
    const std::size_t total = sa_high.rows();

    HighDimModel h;
    h.low = low;
    h.sa_high = sa_high;
    h.assignment = check_modular_structure(sa_high, n);
    h.sa_low = options.sa_low ? *options.sa_low
                              : derive_sign_matrix(OdeSystem(low), options.sign_samples);
    const auto consistency = check_sign_consistency(h.sa_low, sa_high, h.assignment);
    if (!consistency.consistent()) {
        std::ostringstream os;
        os << "sign matrices are inconsistent:";
        for (const auto& v : consistency.violations) {
            os << "\n  " << v.clause << ": " << v.detail;
        }
        throw InputError(os.str());
    }

    check_rates(h.assignment, rates);
    for (double k : rates) {
        if (!(k > 0.0) || !std::isfinite(k)) {
            throw InputError("module degradation rates K must be positive and finite");
        }
    }
    check_eps(eps, n);
    h.rates.assign(rates.begin(), rates.end());
    h.eps.assign(eps.begin(), eps.end());
    h.gains = compute_gains(sa_high, h.assignment, rates, options.require_feasible);
    h.index = build_index_vectors(h.sa_low, sa_high, h.assignment);
    const auto mu = auxiliary_map_expr(h.sa_low, h.gains, h.index, eps);

    ModelSpec& s = h.spec;
    s.name = low.name.empty() ? "high-dimensional" : low.name + "-high";
    s.parameters = low.parameters;
    for (std::size_t i = 0; i < total; ++i) {
        s.variables.push_back("x" + std::to_string(i + 1));
    }
    for (std::size_t i = 0; i < n; ++i) {
        s.interactions.push_back(simplify(substitute(low.interactions[i], mu[i])));
        s.degradation.push_back(low.degradation[i]);
        s.domain.push_back(low.domain[i]);
    }
    for (std::size_t i = n; i < total; ++i) {
        Expr a;
        bool first = true;
        for (std::size_t j = 0; j < total; ++j) {
            const int e = sa_high(i, j);
            if (e == 0) {
                continue;
            }
            const Expr v = Expr::variable(j);
            if (first) {
                a = e > 0 ? v : -v;
                first = false;
            } else {
                a = e > 0 ? a + v : a - v;
            }
        }
        s.interactions.push_back(a);
        s.degradation.push_back(rates[i - n]);
        const auto m = h.assignment.master_of[i];
        const double g = m ? std::abs(h.gains[i]) : 0.0;
        if (m && g > 0.0) {
            s.domain.push_back({g * low.domain[*m].lo, g * low.domain[*m].hi});
        } else {
            s.domain.push_back({0.0, 1.0});
        }
    }

    ConstructionInfo info;
    info.masters = n;
    info.sign_matrix = sa_high.to_rows();
    info.module_rates = h.rates;
    info.eps = h.eps;
    info.lift_gains = h.gains.gamma;
    info.master_of = h.assignment.master_of;
    s.construction = std::move(info);
    s.validate();
    return h;
}

}  // namespace msequiv
