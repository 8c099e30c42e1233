#pragma once

#include "msequiv/model.hpp"
#include "msequiv/system.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace msequiv {

struct SteadyState {
    Vector x;
    double residual = 0.0;  // ||F(x)||_inf
    Matrix jacobian;
    Eigen::VectorXcd eigenvalues;  // real part descending
    int unstable_count = 0;
    bool imaginary_axis = false;
};

struct NewtonOptions {
    double tol = 1e-10;
    int max_iterations = 100;
    int max_halvings = 40;
};

struct SteadyStateOptions {
    std::size_t starts = 2000;
    std::uint64_t seed = 0;
    NewtonOptions newton;
    double re_tol = 1e-9;
    /// Search box; the model domain when absent.
    std::optional<std::vector<Interval>> box;
};

/// Damped Newton from x0. Iterates below the box are clamped onto it.
/// Returns nullopt when the residual does not drop below tol.
std::optional<Vector> newton_solve(const OdeSystem& system, Vector x0,
                                   const std::vector<Interval>& box, const NewtonOptions& options);

/// All eigenvalues, sorted by real part (descending), then imaginary part.
Eigen::VectorXcd eigenvalues(const Matrix& m);

int count_unstable(const Eigen::VectorXcd& ev, double re_tol);

/// Jacobian, spectrum and stability of a (verified) steady state.
SteadyState classify(const OdeSystem& system, const Vector& x, double re_tol = 1e-9);

/// Multistart Newton over the box. States are deduplicated, re-verified and
/// ordered by unstable count, then by dominant leading component.
std::vector<SteadyState> find_steady_states(const OdeSystem& system,
                                            const SteadyStateOptions& options = {});

bool same_state(const Vector& a, const Vector& b);

/// h(z) for a constructed model, with F(h(z)) checked against `tol`.
/// Throws NumericalError when the residual is too large.
Vector lift_steady_state(const OdeSystem& high, const Vector& z, double tol = 1e-8);

}  // namespace msequiv
