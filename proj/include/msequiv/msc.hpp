#pragma once

// Mesenchymal stem cell differentiation fixture: a 3-gene switch between
// adipogenic (z1), osteogenic (z2) and chondrogenic (z3) fates, and its
// 9-gene extension with two modules.

#include "msequiv/model.hpp"
#include "msequiv/structure.hpp"

#include <array>
#include <vector>

namespace msequiv::msc {

ModelSpec low_dim();
SignMatrix low_sign_matrix();
SignMatrix sign_matrix();

/// K_4..K_9 used for the reference high-dimensional model.
std::vector<double> default_rates();
std::vector<double> default_eps();

struct ReferenceState {
    std::vector<double> x;
    std::vector<double> eigenvalues;  // real parts, printed precision
    int unstable = 0;
};

struct GoldenData {
    std::vector<ReferenceState> low;   // 5 states, published order
    std::vector<ReferenceState> high;  // lifted counterparts
    double uo_critical = 4.2;
    double m_critical = 4.5;
    std::array<double, 6> gains{};     // gamma_41, 51, 61, 72, 82, 92 at default K
};

const GoldenData& expected();

/// Reference values are printed to two decimals. A computed value matches when,
/// rounded to the same precision, it lies within `tol` of the printed one.
bool matches_printed(double computed, double printed, double tol = 0.01);

}  // namespace msequiv::msc
