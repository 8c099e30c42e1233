#include "msequiv/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace msequiv {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense output weights for the 4th-order continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

constexpr double kSafe = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kFacMin = 0.2;   // step can shrink to 1/5
constexpr double kFacMax = 10.0;  // or grow 10x

double scaled_norm(const Vector& v, const Vector& sk) {
    return std::sqrt((v.array() / sk.array()).square().mean());
}

double initial_step(const OdeSystem& sys, const Vector& y, const Vector& f0, double t_end,
                    const IntegrateOptions& o) {
    const Vector sk = (o.atol + o.rtol * y.array().abs()).matrix();
    const double dn0 = scaled_norm(y, sk);
    const double dn1 = scaled_norm(f0, sk);
    double h = (dn0 < 1e-10 || dn1 < 1e-10) ? 1e-6 : 0.01 * dn0 / dn1;
    h = std::min(h, t_end);
    const Vector f1 = sys.rhs(y + h * f0);
    const double dn2 = scaled_norm(f1 - f0, sk) / h;
    const double der = std::max(dn1, dn2);
    const double h1 = der <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der, 0.2);
    return std::min({100.0 * h, h1, t_end});
}

int clamp_negative(Vector& y) {
    int c = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] < 0.0) {
            y[i] = 0.0;
            ++c;
        }
    }
    return c;
}

}  // namespace

std::vector<double> uniform_times(double t_end, std::size_t sample_count) {
    std::vector<double> t(std::max<std::size_t>(sample_count, 2));
    for (std::size_t k = 0; k < t.size(); ++k) {
        t[k] = t_end * static_cast<double>(k) / static_cast<double>(t.size() - 1);
    }
    t.back() = t_end;
    return t;
}

Trajectory integrate(const OdeSystem& system, const Vector& x0, double t_end,
                     const IntegrateOptions& o) {
    const auto n = static_cast<Eigen::Index>(system.dimension());
    if (x0.size() != n) {
        throw InputError("initial state has " + std::to_string(x0.size()) + " components, model has " +
                         std::to_string(n));
    }
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw InputError("t_end must be positive");
    }
    if ((x0.array() < 0.0).any()) {
        throw InputError("initial state must be non-negative");
    }
    if (!(o.rtol > 0.0) || !(o.atol > 0.0)) {
        throw InputError("tolerances must be positive");
    }
    const auto& samples = o.sample_times;
    if (!std::is_sorted(samples.begin(), samples.end()) ||
        (!samples.empty() && (samples.front() < 0.0 || samples.back() > t_end))) {
        throw InputError("sample times must be ascending within [0, t_end]");
    }

    Trajectory tr;
    std::vector<Vector> rows;
    std::vector<double> times;
    std::size_t next_sample = 0;
    auto record = [&](double t, Vector y) {
        tr.clamps += static_cast<std::size_t>(clamp_negative(y));
        times.push_back(t);
        rows.push_back(std::move(y));
    };

    double t = 0.0;
    Vector y = x0;
    Vector k1 = system.rhs(y);
    tr.evaluations = 1;
    if (samples.empty()) {
        record(t, y);
    } else {
        while (next_sample < samples.size() && samples[next_sample] <= 0.0) {
            record(samples[next_sample++], y);
        }
    }

    double h = o.initial_step > 0.0 ? o.initial_step : initial_step(system, y, k1, t_end, o);
    ++tr.evaluations;
    double facold = 1e-4;
    bool last_rejected = false;

    Vector k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ynew(n), yerr(n);
    while (t < t_end) {
        if (tr.steps + tr.rejections >= o.max_steps) {
            throw NumericalError("integration exceeded " + std::to_string(o.max_steps) + " steps");
        }
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
            throw NumericalError("step size underflow at t = " + format_number(t));
        }
        if (t + 1.01 * h >= t_end) {
            h = t_end - t;
        }
        k2 = system.rhs(y + h * a21 * k1);
        k3 = system.rhs(y + h * (a31 * k1 + a32 * k2));
        k4 = system.rhs(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        k5 = system.rhs(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        k6 = system.rhs(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        k7 = system.rhs(ynew);
        tr.evaluations += 6;
        yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const Vector sk = (o.atol + o.rtol * y.array().abs().max(ynew.array().abs())).matrix();
        const double err = scaled_norm(yerr, sk);
        if (!std::isfinite(err)) {
            h *= 0.1;
            ++tr.rejections;
            last_rejected = true;
            continue;
        }

        const double fac11 = std::pow(err, kExpo);
        if (err <= 1.0) {
            double fac = fac11 / std::pow(facold, kBeta);
            fac = std::clamp(fac / kSafe, 1.0 / kFacMax, 1.0 / kFacMin);
            double hnew = h / fac;
            if (last_rejected) {
                hnew = std::min(hnew, h);
            }
            facold = std::max(err, 1e-4);

            if (!samples.empty()) {
                const Vector ydiff = ynew - y;
                const Vector bspl = h * k1 - ydiff;
                const Vector r4 = ydiff - h * k7 - bspl;
                const Vector r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                const double t_new = t + h;
                while (next_sample < samples.size() && samples[next_sample] <= t_new) {
                    const double th = (samples[next_sample] - t) / h;
                    const double th1 = 1.0 - th;
                    record(samples[next_sample++],
                           y + th * (ydiff + th1 * (bspl + th * (r4 + th1 * r5))));
                }
            }

            t = (h == t_end - t) ? t_end : t + h;
            y = ynew;
            k1 = k7;
            if (const int c = clamp_negative(y); c > 0) {
                tr.clamps += static_cast<std::size_t>(c);
                k1 = system.rhs(y);
                ++tr.evaluations;
            }
            ++tr.steps;
            if (samples.empty()) {
                record(t, y);
            }
            h = hnew;
            last_rejected = false;
        } else {
            h /= std::min(1.0 / kFacMin, fac11 / kSafe);
            ++tr.rejections;
            last_rejected = true;
        }
    }
    while (next_sample < samples.size()) {
        record(samples[next_sample++], y);
    }

    tr.t = std::move(times);
    tr.states.resize(static_cast<Eigen::Index>(rows.size()), n);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        tr.states.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    }
    return tr;
}

}  // namespace msequiv
