#pragma once

// Loopbroken linearisations and Nyquist curves of det(I - G(jw)).
//
// Linearising dx/dt = A(x) - D(x) at a steady state and cutting every
// interaction loop leaves the open-loop system with transfer matrix
//
//   G(s) = (sI + d)^{-1} a,   a = dA/dx,  d = dD/dx (positive diagonal)
//
// so all open-loop poles are stable and det(I - G(s)) = det(sI - J) / prod(s + d_i).
// The right-half-plane zeros of det(I - G) are then the unstable modes of J,
// counted by the winding number of the curve around the origin.

#include "msequiv/system.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace msequiv {

using Complex = std::complex<double>;

struct LoopbrokenSystem {
    Vector d;  // degradation rates (diagonal)
    Matrix a;  // interaction Jacobian

    [[nodiscard]] std::size_t dimension() const noexcept { return static_cast<std::size_t>(d.size()); }
};

/// Splits the Jacobian at x into -diag(d) + a using the model's degradation
/// terms. Throws InputError for a non-positive rate.
LoopbrokenSystem loopbreak(const OdeSystem& system, const Vector& x);

/// (lambda I + d)^{-1} a. Throws NumericalError at a pole.
Eigen::MatrixXcd transfer_matrix(const LoopbrokenSystem& sys, Complex lambda);

/// det(I - G(lambda)).
Complex return_difference(const LoopbrokenSystem& sys, Complex lambda);

struct NyquistOptions {
    /// Upper frequency; 0 picks 1e3 * max(1, spectral radius of J) and
    /// extends it until the curve is within `tail_tol` of 1.
    double omega_max = 0.0;
    std::size_t base_points = 512;
    double floor = 1e-10;
    double tail_tol = 1e-3;
    std::size_t max_points = 1'000'000;
};

struct NyquistCurve {
    /// Ascending over [-omega_max, omega_max]; the negative half is the
    /// conjugate mirror of the positive half.
    std::vector<double> omega;
    std::vector<Complex> value;
    /// Signed number of counterclockwise turns around the origin as omega
    /// runs from -inf to +inf, closed through the point 1 at infinity.
    int winding = 0;
    double min_distance = 0.0;
    double omega_max = 0.0;
};

/// Samples, refines and winds the curve. Throws NumericalError when it comes
/// within `floor` of the origin (an eigenvalue on the imaginary axis) or the
/// refinement budget runs out.
NyquistCurve nyquist_curve(const LoopbrokenSystem& sys, const NyquistOptions& options = {});

/// Unstable modes of the closed loop. Open-loop poles are stable, so every
/// right-half-plane zero contributes one clockwise turn: count = -winding.
int unstable_count_from_winding(const NyquistCurve& curve);

struct TubeReport {
    double eps = 0.0;        // min_w |det(I - G_low(jw))|
    double deviation = 0.0;  // sup_w |det_high - det_low|
    bool within_tube = false;
    int winding_low = 0;
    int winding_high = 0;
    std::size_t samples = 0;
};

/// Evaluates both curves on the union of their refined grids.
TubeReport compare_nyquist(const LoopbrokenSystem& low, const LoopbrokenSystem& high,
                           const NyquistOptions& options = {});

}  // namespace msequiv
