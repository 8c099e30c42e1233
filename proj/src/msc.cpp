#include "msequiv/msc.hpp"

#include <cmath>

namespace msequiv::msc {

ModelSpec low_dim() {
    return make_model(
        "msc", {"z1", "z2", "z3"},
        {{"m", 1.0}, {"uA", 0.0}, {"uO", 0.0}, {"uC", 0.0}},
        {
            "(0.2*z1^2 + 0.5 + uA) / (10*m + 0.1*z1^2 + 0.5*z2^2 + 0.5*z3^2)",
            "(0.1*z2^2 + 1 + uO) / (1*m + 0.1*z2^2 + 0.5*z1^2 + 0.1*z3^2)",
            "(0.1*z3^2 + 1 + uC) / (1*m + 0.1*z3^2 + 0.5*z1^2 + 0.1*z2^2)",
        },
        {0.1, 0.1, 0.1}, {{0.0, 20.0}, {0.0, 20.0}, {0.0, 20.0}});
}

SignMatrix low_sign_matrix() {
    return SignMatrix({
        {+1, -1, -1},
        {-1, +1, -1},
        {-1, -1, +1},
    });
}

SignMatrix sign_matrix() {
    // Row = target, column = source. Masters x1..x3, adipogenic module
    // x4..x6, osteogenic module x7..x9; the chondrogenic master has none.
    SignMatrix s(9, 9);
    auto edge = [&s](std::size_t from, std::size_t to, int sign) { s.set(to - 1, from - 1, sign); };
    edge(1, 1, +1);  // self activation of each master
    edge(2, 2, +1);
    edge(3, 3, +1);
    edge(3, 2, -1);  // x3 represses x2
    edge(3, 1, -1);  // x3 represses x1
    edge(1, 2, -1);  // x1 represses x2
    edge(2, 7, +1);  // x2 drives its module
    edge(2, 8, +1);
    edge(2, 9, +1);
    edge(1, 4, +1);  // x1 drives x4 and x5
    edge(1, 5, +1);
    edge(4, 3, -1);  // x4 carries the adipogenic repression of x3 and x2
    edge(4, 2, -1);
    edge(4, 6, +1);
    edge(5, 6, +1);
    edge(4, 5, +1);  // x4 and x5 activate each other and themselves
    edge(5, 4, +1);
    edge(4, 4, +1);
    edge(5, 5, +1);
    edge(8, 3, -1);  // x8 carries the osteogenic repression of x3
    edge(9, 1, -1);  // x9 carries the osteogenic repression of x1
    return s;
}

std::vector<double> default_rates() { return {3.0, 3.0, 1.0, 1.0, 1.0, 1.0}; }

std::vector<double> default_eps() { return {1e-3, 1e-3, 1e-3}; }

namespace {

GoldenData make_expected() {
    GoldenData g;
    const double z[5][3] = {
        {12.00, 0.14, 0.14}, {0.08, 9.90, 1.01}, {0.08, 1.01, 9.90},
        {7.67, 0.33, 0.33},  {0.12, 5.67, 5.67},
    };
    const double lam_low[5][3] = {
        {-0.02, -0.10, -0.10}, {-0.11, -0.10, -0.07}, {-0.10, -0.11, -0.07},
        {+0.02, -0.10, -0.10}, {-0.10, -0.12, +0.05},
    };
    const double x[5][9] = {
        {12.00, 0.14, 0.14, 12.00, 12.00, 24.00, 0.14, 0.14, 0.14},
        {0.08, 9.90, 1.01, 0.08, 0.08, 0.17, 9.90, 9.90, 9.90},
        {0.08, 1.01, 9.90, 0.08, 0.08, 0.17, 1.01, 1.01, 1.01},
        {7.67, 0.33, 0.33, 7.67, 7.67, 15.35, 0.33, 0.33, 0.33},
        {0.12, 5.67, 5.67, 0.12, 0.12, 0.24, 5.67, 5.67, 5.67},
    };
    const double lam_high[5][9] = {
        {-0.02, -0.10, -0.10, -1.00, -1.00, -1.00, -1.00, -1.00, -3.00},
        {-0.11, -0.10, -0.07, -1.00, -1.00, -1.00, -1.00, -1.00, -3.00},
        {-0.10, -0.11, -0.07, -1.00, -1.00, -1.00, -1.00, -1.00, -3.00},
        {+0.02, -0.10, -0.10, -1.00, -1.00, -1.00, -1.01, -1.00, -3.00},
        {-0.10, -0.13, +0.05, -1.00, -1.00, -1.00, -1.00, -1.00, -3.00},
    };
    const int unstable[5] = {0, 0, 0, 1, 1};
    for (int r = 0; r < 5; ++r) {
        g.low.push_back({{z[r], z[r] + 3}, {lam_low[r], lam_low[r] + 3}, unstable[r]});
        g.high.push_back({{x[r], x[r] + 9}, {lam_high[r], lam_high[r] + 9}, unstable[r]});
    }
    g.gains = {1.0, 1.0, 2.0, 1.0, 1.0, 1.0};
    return g;
}

}  // namespace

bool matches_printed(double computed, double printed, double tol) {
    const double rounded = std::round(computed * 100.0) / 100.0;
    return std::abs(rounded - printed) <= tol + 1e-9;
}

const GoldenData& expected() {
    static const GoldenData g = make_expected();
    return g;
}

}  // namespace msequiv::msc
