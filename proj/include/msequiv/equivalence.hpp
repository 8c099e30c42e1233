#pragma once

// Numerical check that a constructed model is multistability-equivalent to
// its low-dimensional source:
//   (i)   sgn(dA/dx) equals the construction sign matrix on sampled points,
//   (ii)  every low-dimensional steady state lifts to a high-dimensional one,
//         h is injective on them, and there are no other high-dimensional
//         states in the search box,
//   (iii) paired states have the same number of unstable modes.

#include "msequiv/analysis.hpp"
#include "msequiv/frequency.hpp"

#include <optional>
#include <string>
#include <vector>

namespace msequiv {

struct EquivalenceOptions {
    SteadyStateOptions steady;
    std::size_t sign_samples = 1000;
    double lift_tol = 1e-8;
    /// Annotate each pair with winding numbers and the tube comparison.
    bool nyquist = true;
    NyquistOptions nyquist_options;
};

struct SignMismatch {
    std::size_t row = 0;
    std::size_t col = 0;
    int expected = 0;
    int observed = 0;
    std::vector<double> point;
};

struct PairRecord {
    Vector z;
    Vector x;
    double low_residual = 0.0;
    double lift_residual = 0.0;
    int low_unstable = 0;
    int high_unstable = 0;
    bool imaginary_axis = false;
    std::optional<TubeReport> nyquist;
    std::string nyquist_error;
    bool ok = false;
};

struct EquivalenceReport {
    bool sign_check = false;
    std::size_t sign_points = 0;
    std::vector<SignMismatch> sign_mismatches;  // first few only

    bool lift_check = false;
    bool injective = false;
    std::size_t low_states = 0;
    std::size_t high_states = 0;
    std::size_t unmatched_high_states = 0;
    bool bijection = false;

    bool stability_check = false;
    std::vector<PairRecord> pairs;
    std::vector<std::size_t> inconclusive;  // pair indices with axis eigenvalues

    bool verdict = false;
};

/// `high` must carry construction data (as produced by assemble_high_dim
/// or loaded from a constructed model file). Both systems must share
/// parameter bindings.
EquivalenceReport check_equivalence(const OdeSystem& low, const OdeSystem& high,
                                    const EquivalenceOptions& options = {});

}  // namespace msequiv
