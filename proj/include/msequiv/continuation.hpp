#pragma once

#include "msequiv/analysis.hpp"
#include "msequiv/system.hpp"

#include <string>
#include <vector>

namespace msequiv {

struct BranchPoint {
    double p = 0.0;
    Vector x;
    int unstable_count = 0;
    double leading_re = 0.0;  // largest real part of the spectrum
    double tangent_p = 0.0;   // parameter component of the unit tangent
};

struct FoldPoint {
    double p = 0.0;
    Vector x;
    std::size_t segment = 0;  // between points[segment] and points[segment + 1]
    int unstable_before = 0;
    int unstable_after = 0;
};

/// Stability change not explained by a fold (e.g. Hopf or branch point).
struct OtherBifurcation {
    double p = 0.0;
    Vector x;
    std::size_t segment = 0;
    int unstable_before = 0;
    int unstable_after = 0;
};

struct Branch {
    std::string parameter;
    std::vector<BranchPoint> points;
    std::vector<FoldPoint> folds;
    std::vector<OtherBifurcation> other;
    std::string stop_reason;
};

struct ContinuationOptions {
    double initial_step = 0.05;
    double min_step = 1e-7;
    double max_step = 0.5;
    double growth = 1.3;
    int grow_after = 4;
    std::size_t max_points = 20000;
    NewtonOptions corrector{1e-10, 25, 0};
    /// Largest tolerated angle between consecutive tangents (cosine).
    double min_tangent_cos = 0.95;
    double fold_tol = 1e-3;
    double re_tol = 1e-9;
};

/// Pseudo-arclength continuation of the steady state `seed` of `system` in
/// parameter `param` from p_from towards p_to. The seed is polished by
/// Newton at p_from first. Stops when the branch leaves the parameter
/// interval, after max_points, or when the corrector fails below min_step.
Branch continue_branch(const OdeSystem& system, const std::string& param, double p_from,
                       double p_to, const Vector& seed, const ContinuationOptions& options = {});

/// Folds of an existing branch: sign changes of tangent_p, refined by
/// arclength bisection until the bracketing parameter values agree to
/// fold_tol.
std::vector<FoldPoint> detect_folds(const OdeSystem& system, const Branch& branch,
                                    const ContinuationOptions& options = {});

}  // namespace msequiv
