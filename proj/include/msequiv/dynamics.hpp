#pragma once

#include "msequiv/system.hpp"

#include <vector>

namespace msequiv {

struct IntegrateOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    /// Output times; empty means every accepted step.
    std::vector<double> sample_times;
    double initial_step = 0.0;  // 0 = automatic
    std::size_t max_steps = 10'000'000;
};

struct Trajectory {
    std::vector<double> t;
    Matrix states;  // samples x dim
    std::size_t steps = 0;
    std::size_t rejections = 0;
    std::size_t evaluations = 0;
    std::size_t clamps = 0;  // negative components reset to 0

    [[nodiscard]] Vector final_state() const { return states.row(states.rows() - 1).transpose(); }
};

/// Dormand-Prince 5(4) with PI step-size control and 4th-order dense output.
/// Throws NumericalError on step-size underflow or when max_steps is hit.
Trajectory integrate(const OdeSystem& system, const Vector& x0, double t_end,
                     const IntegrateOptions& options = {});

/// `sample_count` equally spaced output times on [0, t_end], endpoints included.
std::vector<double> uniform_times(double t_end, std::size_t sample_count);

}  // namespace msequiv
