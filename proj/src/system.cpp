#include "msequiv/system.hpp"

namespace msequiv {

OdeSystem::OdeSystem(ModelSpec spec) {
    spec.validate();
    auto tables = std::make_shared<Tables>();
    const std::size_t n = spec.dimension();
    const std::size_t p = spec.parameters.size();
    tables->jac.resize(n * n);
    tables->nonzero_cols.resize(n);
    tables->dparam.resize(n * p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            Expr d = simplify(differentiate(spec.interactions[i], j));
            if (!d.is_constant(0.0)) {
                tables->nonzero_cols[i].push_back(j);
            }
            tables->jac[i * n + j] = std::move(d);
        }
        for (std::size_t k = 0; k < p; ++k) {
            tables->dparam[i * p + k] = simplify(differentiate_parameter(spec.interactions[i], k));
        }
    }
    params_ = spec.parameter_values();
    tables->spec = std::move(spec);
    tables_ = std::move(tables);
}

double OdeSystem::parameter(const std::string& name) const {
    const auto idx = spec().parameter_index(name);
    if (!idx) {
        throw ModelError("parameters", "unknown parameter '" + name + "'");
    }
    return params_[*idx];
}

OdeSystem OdeSystem::with_parameter(const std::string& name, double value) const {
    const auto idx = spec().parameter_index(name);
    if (!idx) {
        throw ModelError("parameters", "unknown parameter '" + name + "'");
    }
    return with_parameter(*idx, value);
}

OdeSystem OdeSystem::with_parameter(std::size_t index, double value) const {
    OdeSystem copy = *this;
    copy.params_.at(index) = value;
    return copy;
}

Vector OdeSystem::interaction(const Vector& x) const {
    const std::size_t n = dimension();
    const std::span<const double> xs(x.data(), n);
    Vector a(static_cast<Eigen::Index>(n));
    try {
        for (std::size_t i = 0; i < n; ++i) {
            a[static_cast<Eigen::Index>(i)] = evaluate(spec().interactions[i], xs, params_);
        }
    } catch (const EvalError& e) {
        const auto params = spec().parameter_names();
        throw EvalError("division by zero in '" +
                            to_string(e.culprit(), spec().variables, params) + "'",
                        e.culprit());
    }
    return a;
}

Vector OdeSystem::degradation_rates() const {
    const auto& k = spec().degradation;
    return Eigen::Map<const Vector>(k.data(), static_cast<Eigen::Index>(k.size()));
}

Vector OdeSystem::rhs(const Vector& x) const {
    return interaction(x) - degradation_rates().cwiseProduct(x);
}

Matrix OdeSystem::interaction_jacobian(const Vector& x) const {
    const std::size_t n = dimension();
    const std::span<const double> xs(x.data(), n);
    Matrix jac = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j : tables_->nonzero_cols[i]) {
            jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                evaluate(tables_->jac[i * n + j], xs, params_);
        }
    }
    return jac;
}

Matrix OdeSystem::jacobian(const Vector& x) const {
    Matrix jac = interaction_jacobian(x);
    jac.diagonal() -= degradation_rates();
    return jac;
}

Vector OdeSystem::parameter_derivative(const Vector& x, std::size_t index) const {
    const std::size_t n = dimension();
    const std::size_t p = spec().parameters.size();
    const std::span<const double> xs(x.data(), n);
    Vector d(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        d[static_cast<Eigen::Index>(i)] = evaluate(tables_->dparam[i * p + index], xs, params_);
    }
    return d;
}

const Expr& OdeSystem::derivative_expr(std::size_t i, std::size_t j) const {
    return tables_->jac.at(i * dimension() + j);
}

}  // namespace msequiv
