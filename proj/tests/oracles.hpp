#pragma once

// Independent reference computations shared by the test suites. Nothing in
// here calls into the code paths it is used to check.

#include "msequiv/expr.hpp"
#include "msequiv/system.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

struct MscParams {
    double m = 1.0, uA = 0.0, uO = 0.0, uC = 0.0;
};

inline double a1(double z1, double z2, double z3, const MscParams& p) {
    return (0.2 * z1 * z1 + 0.5 + p.uA) / (10 * p.m + 0.1 * z1 * z1 + 0.5 * z2 * z2 + 0.5 * z3 * z3);
}
inline double a2(double z1, double z2, double z3, const MscParams& p) {
    return (0.1 * z2 * z2 + 1 + p.uO) / (p.m + 0.1 * z2 * z2 + 0.5 * z1 * z1 + 0.1 * z3 * z3);
}
inline double a3(double z1, double z2, double z3, const MscParams& p) {
    return (0.1 * z3 * z3 + 1 + p.uC) / (p.m + 0.1 * z3 * z3 + 0.5 * z1 * z1 + 0.1 * z2 * z2);
}

inline std::array<double, 3> msc_low(const std::array<double, 3>& z, const MscParams& p = {}) {
    return {a1(z[0], z[1], z[2], p) - 0.1 * z[0], a2(z[0], z[1], z[2], p) - 0.1 * z[1],
            a3(z[0], z[1], z[2], p) - 0.1 * z[2]};
}

/// Closed-form module gains for rates K4..K9.
struct MscGains {
    double g41, g51, g61, g72, g82, g92;
};

inline MscGains msc_gains(const std::array<double, 6>& k) {
    const double den = k[0] * k[1] - k[0] - k[1];
    return {k[1] / den, k[0] / den, (k[0] + k[1]) / (k[2] * den), 1 / k[3], 1 / k[4], 1 / k[5]};
}

/// The 9-gene vector field written out by hand.
inline std::array<double, 9> msc_high(const std::array<double, 9>& x, const std::array<double, 6>& k,
                                      const MscParams& p = {}) {
    const auto g = msc_gains(k);
    const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3], x5 = x[4], x6 = x[5], x7 = x[6],
                 x8 = x[7], x9 = x[8];
    return {
        a1(x1, x9 / g.g92, x3, p) - 0.1 * x1,
        a2((x1 + x4 / g.g41) / 2, x2, x3, p) - 0.1 * x2,
        a3(x4 / g.g41, x8 / g.g82, x3, p) - 0.1 * x3,
        x1 + x4 + x5 - k[0] * x4,
        x1 + x4 + x5 - k[1] * x5,
        x4 + x5 - k[2] * x6,
        x2 - k[3] * x7,
        x2 - k[4] * x8,
        x2 - k[5] * x9,
    };
}

/// Central differences of F at x.
inline msequiv::Matrix finite_difference_jacobian(
    const std::function<msequiv::Vector(const msequiv::Vector&)>& f, const msequiv::Vector& x,
    double h = 1e-6) {
    const auto n = x.size();
    msequiv::Matrix j(f(x).size(), n);
    for (Eigen::Index c = 0; c < n; ++c) {
        msequiv::Vector xp = x, xm = x;
        const double step = h * std::max(1.0, std::abs(x[c]));
        xp[c] += step;
        xm[c] -= step;
        j.col(c) = (f(xp) - f(xm)) / (2 * step);
    }
    return j;
}

/// Characteristic polynomial coefficients (monic, highest degree first) by
/// the Faddeev-LeVerrier recursion.
inline std::vector<double> characteristic_polynomial(const msequiv::Matrix& a) {
    const auto n = a.rows();
    std::vector<double> c(static_cast<std::size_t>(n) + 1);
    c[0] = 1.0;
    msequiv::Matrix m = msequiv::Matrix::Zero(n, n);
    const msequiv::Matrix id = msequiv::Matrix::Identity(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        m = a * m + c[static_cast<std::size_t>(k - 1)] * id;
        c[static_cast<std::size_t>(k)] = -(a * m).trace() / static_cast<double>(k);
    }
    return c;
}

/// All roots of a monic polynomial by Durand-Kerner iteration.
inline std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& c) {
    using C = std::complex<double>;
    const std::size_t n = c.size() - 1;
    auto eval = [&](C z) {
        C v = c[0];
        for (std::size_t k = 1; k < c.size(); ++k) {
            v = v * z + c[k];
        }
        return v;
    };
    double bound = 0.0;
    for (std::size_t k = 1; k < c.size(); ++k) {
        bound = std::max(bound, std::abs(c[k]));
    }
    const double r = 1.0 + bound;
    std::vector<C> z(n);
    for (std::size_t k = 0; k < n; ++k) {
        z[k] = std::polar(r * 0.9, 0.4 + 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n));
    }
    for (int it = 0; it < 5000; ++it) {
        double change = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            C den = 1.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != k) {
                    den *= z[k] - z[j];
                }
            }
            const C step = eval(z[k]) / den;
            z[k] -= step;
            change = std::max(change, std::abs(step));
        }
        if (change < 1e-15 * r) {
            break;
        }
    }
    // Polish each root with Newton on the polynomial.
    for (auto& root : z) {
        for (int it = 0; it < 5; ++it) {
            C v = c[0], d = 0.0;
            for (std::size_t k = 1; k < c.size(); ++k) {
                d = d * root + v;
                v = v * root + c[k];
            }
            if (std::abs(d) == 0.0) {
                break;
            }
            root -= v / d;
        }
    }
    return z;
}

/// Random expression tree over `vars` variables and `params` parameters.
class ExprGenerator {
public:
    ExprGenerator(std::size_t vars, std::size_t params, std::uint64_t seed)
        : vars_(vars), params_(params), rng_(seed) {}

    msequiv::Expr operator()(int depth = 5) {
        std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 8);
        switch (pick(rng_)) {
        case 0: return constant();
        case 1: return msequiv::Expr::variable(index(vars_));
        case 2: return params_ ? msequiv::Expr::parameter(index(params_)) : constant();
        case 3: return msequiv::Expr::negate((*this)(depth - 1));
        case 4: return msequiv::Expr::add((*this)(depth - 1), (*this)(depth - 1));
        case 5: return msequiv::Expr::subtract((*this)(depth - 1), (*this)(depth - 1));
        case 6: return msequiv::Expr::multiply((*this)(depth - 1), (*this)(depth - 1));
        case 7: return msequiv::Expr::divide((*this)(depth - 1), (*this)(depth - 1));
        default: {
            std::uniform_int_distribution<int> e(-3, 4);
            return msequiv::Expr::power((*this)(depth - 1), e(rng_));
        }
        }
    }

private:
    msequiv::Expr constant() {
        std::uniform_int_distribution<int> mant(1, 99999);
        std::uniform_int_distribution<int> scale(-4, 3);
        return msequiv::Expr::constant(mant(rng_) * std::pow(10.0, scale(rng_)));
    }
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
    }

    std::size_t vars_;
    std::size_t params_;
    std::mt19937_64 rng_;
};

/// Classical fixed-step Runge-Kutta 4, used as an independent integrator.
template <class F>
msequiv::Vector rk4(F&& f, msequiv::Vector x, double t_end, std::size_t steps) {
    const double h = t_end / static_cast<double>(steps);
    for (std::size_t s = 0; s < steps; ++s) {
        const msequiv::Vector k1 = f(x);
        const msequiv::Vector k2 = f(x + 0.5 * h * k1);
        const msequiv::Vector k3 = f(x + 0.5 * h * k2);
        const msequiv::Vector k4 = f(x + h * k3);
        x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return x;
}

}  // namespace oracle
