#pragma once

#include "msequiv/model.hpp"

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

namespace msequiv {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A model with its symbolic Jacobian precomputed and a fixed parameter
/// binding. Cheap to copy; copies share the derivative tables.
///
///   F(x) = A(x) - diag(k) x
class OdeSystem {
public:
    explicit OdeSystem(ModelSpec spec);

    [[nodiscard]] const ModelSpec& spec() const noexcept { return tables_->spec; }
    [[nodiscard]] std::size_t dimension() const noexcept { return tables_->spec.dimension(); }
    [[nodiscard]] const std::vector<double>& parameters() const noexcept { return params_; }
    [[nodiscard]] double parameter(const std::string& name) const;

    /// Copy with one parameter rebound.
    [[nodiscard]] OdeSystem with_parameter(const std::string& name, double value) const;
    [[nodiscard]] OdeSystem with_parameter(std::size_t index, double value) const;

    [[nodiscard]] Vector interaction(const Vector& x) const;
    [[nodiscard]] Vector degradation_rates() const;
    [[nodiscard]] Vector rhs(const Vector& x) const;

    /// dA/dx from the symbolic derivatives.
    [[nodiscard]] Matrix interaction_jacobian(const Vector& x) const;
    /// dF/dx = dA/dx - diag(k).
    [[nodiscard]] Matrix jacobian(const Vector& x) const;
    /// dF/dp for parameter `index`.
    [[nodiscard]] Vector parameter_derivative(const Vector& x, std::size_t index) const;

    /// Symbolic entry dA_i/dx_j.
    [[nodiscard]] const Expr& derivative_expr(std::size_t i, std::size_t j) const;

private:
    struct Tables {
        ModelSpec spec;
        std::vector<Expr> jac;  // row-major N x N, simplified
        std::vector<std::vector<std::size_t>> nonzero_cols;
        std::vector<Expr> dparam;  // row-major N x P
    };

    std::shared_ptr<const Tables> tables_;
    std::vector<double> params_;
};

}  // namespace msequiv
