#include "msequiv/frequency.hpp"

#include "msequiv/analysis.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace msequiv {

LoopbrokenSystem loopbreak(const OdeSystem& system, const Vector& x) {
    LoopbrokenSystem sys;
    sys.d = system.degradation_rates();
    for (Eigen::Index i = 0; i < sys.d.size(); ++i) {
        if (!(sys.d[i] > 0.0)) {
            throw InputError("degradation rate " + std::to_string(i + 1) + " is not positive");
        }
    }
    sys.a = system.interaction_jacobian(x);
    return sys;
}

Eigen::MatrixXcd transfer_matrix(const LoopbrokenSystem& sys, Complex lambda) {
    const Eigen::Index n = sys.d.size();
    Eigen::MatrixXcd g = sys.a.cast<Complex>();
    for (Eigen::Index i = 0; i < n; ++i) {
        const Complex pole = lambda + sys.d[i];
        if (std::abs(pole) == 0.0) {
            throw NumericalError("transfer matrix evaluated at a pole");
        }
        g.row(i) /= pole;
    }
    return g;
}

Complex return_difference(const LoopbrokenSystem& sys, Complex lambda) {
    const Eigen::Index n = sys.d.size();
    if (n == 0) {
        return 1.0;
    }
    Eigen::MatrixXcd m = -transfer_matrix(sys, lambda);
    m.diagonal().array() += 1.0;
    return Eigen::PartialPivLU<Eigen::MatrixXcd>(m).determinant();
}

namespace {

constexpr double kPi = std::numbers::pi;

double phase_step(Complex from, Complex to) { return std::arg(to / from); }

double default_omega_max(const LoopbrokenSystem& sys) {
    Matrix j = sys.a;
    j.diagonal() -= sys.d;
    double rho = 0.0;
    if (j.size() > 0) {
        rho = eigenvalues(j).cwiseAbs().maxCoeff();
    }
    return 1e3 * std::max(1.0, rho);
}

struct HalfCurve {
    std::vector<double> omega;
    std::vector<Complex> value;
};

Complex at(const LoopbrokenSystem& sys, double w) { return return_difference(sys, Complex(0.0, w)); }

double split_point(double lo, double hi) {
    if (lo <= 0.0) {
        return 0.5 * hi;
    }
    return std::sqrt(lo * hi);
}

/// Positive-frequency half on [0, omega_max], refined until adjacent samples
/// are close in phase and in distance relative to the origin.
HalfCurve sample_half(const LoopbrokenSystem& sys, double omega_max, const NyquistOptions& opt) {
    double dmin = sys.d.size() ? sys.d.minCoeff() : 1.0;
    const double w_lo = 1e-4 * std::min(1.0, dmin);
    HalfCurve c;
    c.omega.push_back(0.0);
    const std::size_t m = std::max<std::size_t>(opt.base_points, 2);
    const double l0 = std::log(w_lo);
    const double l1 = std::log(omega_max);
    for (std::size_t k = 0; k < m; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(m - 1);
        c.omega.push_back(std::exp(l0 + t * (l1 - l0)));
    }
    c.omega.back() = omega_max;
    c.value.reserve(c.omega.size());
    for (double w : c.omega) {
        c.value.push_back(at(sys, w));
    }

    auto min_abs = [&] {
        double e = std::abs(c.value.front());
        for (const auto& v : c.value) {
            e = std::min(e, std::abs(v));
        }
        return e;
    };
    for (;;) {
        const double eps = min_abs();
        if (eps < opt.floor) {
            throw NumericalError("Nyquist curve passes within " + format_number(eps) +
                                 " of the origin: eigenvalue on the imaginary axis");
        }
        std::vector<double> w2{c.omega.front()};
        std::vector<Complex> v2{c.value.front()};
        bool refined = false;
        for (std::size_t k = 0; k + 1 < c.omega.size(); ++k) {
            const Complex a = c.value[k];
            const Complex b = c.value[k + 1];
            const double step = std::abs(b - a);
            const double local = std::max(0.25 * eps, 0.25 * std::min(std::abs(a), std::abs(b)));
            const bool coarse = std::abs(phase_step(a, b)) >= 0.5 * kPi || step >= local;
            const double mid = split_point(c.omega[k], c.omega[k + 1]);
            if (coarse && mid > c.omega[k] && mid < c.omega[k + 1]) {
                w2.push_back(mid);
                v2.push_back(at(sys, mid));
                refined = true;
            }
            w2.push_back(c.omega[k + 1]);
            v2.push_back(b);
        }
        c.omega = std::move(w2);
        c.value = std::move(v2);
        if (!refined) {
            break;
        }
        if (2 * c.omega.size() > opt.max_points) {
            throw NumericalError("Nyquist refinement budget of " + std::to_string(opt.max_points) +
                                 " points exceeded");
        }
    }
    return c;
}

double choose_omega_max(const LoopbrokenSystem& sys, const NyquistOptions& opt) {
    if (opt.omega_max > 0.0) {
        return opt.omega_max;
    }
    double w = default_omega_max(sys);
    for (int k = 0; k < 60 && std::abs(at(sys, w) - 1.0) >= opt.tail_tol; ++k) {
        w *= 2.0;
    }
    return w;
}

}  // namespace

NyquistCurve nyquist_curve(const LoopbrokenSystem& sys, const NyquistOptions& options) {
    NyquistCurve curve;
    curve.omega_max = choose_omega_max(sys, options);
    const HalfCurve half = sample_half(sys, curve.omega_max, options);

    const std::size_t h = half.omega.size();
    curve.omega.reserve(2 * h - 1);
    curve.value.reserve(2 * h - 1);
    for (std::size_t k = h; k-- > 1;) {
        curve.omega.push_back(-half.omega[k]);
        curve.value.push_back(std::conj(half.value[k]));
    }
    for (std::size_t k = 0; k < h; ++k) {
        curve.omega.push_back(half.omega[k]);
        curve.value.push_back(half.value[k]);
    }

    double total = 0.0;
    curve.min_distance = std::abs(curve.value.front());
    for (std::size_t k = 0; k + 1 < curve.value.size(); ++k) {
        total += phase_step(curve.value[k], curve.value[k + 1]);
        curve.min_distance = std::min(curve.min_distance, std::abs(curve.value[k + 1]));
    }
    // Close the contour through infinity, where the curve tends to 1.
    total += phase_step(curve.value.back(), curve.value.front());
    const double turns = total / (2.0 * kPi);
    curve.winding = static_cast<int>(std::lround(turns));
    if (std::abs(turns - curve.winding) > 0.25) {
        throw NumericalError("winding number is not close to an integer");
    }
    return curve;
}

int unstable_count_from_winding(const NyquistCurve& curve) { return -curve.winding; }

TubeReport compare_nyquist(const LoopbrokenSystem& low, const LoopbrokenSystem& high,
                           const NyquistOptions& options) {
    const NyquistCurve cl = nyquist_curve(low, options);
    const NyquistCurve ch = nyquist_curve(high, options);
    std::vector<double> grid;
    for (const auto* c : {&cl, &ch}) {
        for (double w : c->omega) {
            if (w >= 0.0) {
                grid.push_back(w);
            }
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    TubeReport r;
    r.eps = std::numeric_limits<double>::infinity();
    for (double w : grid) {
        const Complex vl = at(low, w);
        const Complex vh = at(high, w);
        r.eps = std::min(r.eps, std::abs(vl));
        r.deviation = std::max(r.deviation, std::abs(vh - vl));
    }
    r.samples = grid.size();
    r.within_tube = r.deviation < r.eps;
    r.winding_low = cl.winding;
    r.winding_high = ch.winding;
    return r;
}

}  // namespace msequiv
