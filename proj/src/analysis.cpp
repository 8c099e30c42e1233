#include "msequiv/analysis.hpp"

#include "msequiv/construction.hpp"
#include "msequiv/sampling.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>

namespace msequiv {

namespace {

double inf_norm(const Vector& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

std::optional<double> residual_at(const OdeSystem& system, const Vector& x) {
    try {
        const double r = inf_norm(system.rhs(x));
        if (std::isfinite(r)) {
            return r;
        }
    } catch (const EvalError&) {
    }
    return std::nullopt;
}

void clamp_below(Vector& x, const std::vector<Interval>& box) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        x[i] = std::max(x[i], box[static_cast<std::size_t>(i)].lo);
    }
}

}  // namespace

std::optional<Vector> newton_solve(const OdeSystem& system, Vector x,
                                   const std::vector<Interval>& box, const NewtonOptions& options) {
    auto r = residual_at(system, x);
    if (!r) {
        return std::nullopt;
    }
    for (int it = 0; it < options.max_iterations; ++it) {
        if (*r < options.tol) {
            return x;
        }
        Vector f;
        Matrix j;
        try {
            f = system.rhs(x);
            j = system.jacobian(x);
        } catch (const EvalError&) {
            return std::nullopt;
        }
        Eigen::PartialPivLU<Matrix> lu(j);
        const Vector dx = lu.solve(-f);
        if (!dx.allFinite()) {
            return std::nullopt;
        }
        double t = 1.0;
        bool accepted = false;
        for (int h = 0; h <= options.max_halvings; ++h, t *= 0.5) {
            Vector trial = x + t * dx;
            clamp_below(trial, box);
            const auto rt = residual_at(system, trial);
            if (rt && *rt < *r) {
                x = std::move(trial);
                r = rt;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            return std::nullopt;
        }
    }
    if (*r < options.tol) {
        return x;
    }
    return std::nullopt;
}

Eigen::VectorXcd eigenvalues(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw InputError("eigenvalues need a square matrix");
    }
    if (m.rows() == 0) {
        return {};
    }
    Eigen::EigenSolver<Matrix> solver(m, false);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigenvalue iteration did not converge");
    }
    Eigen::VectorXcd ev = solver.eigenvalues();
    std::sort(ev.data(), ev.data() + ev.size(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) {
            return a.real() > b.real();
        }
        return a.imag() > b.imag();
    });
    return ev;
}

int count_unstable(const Eigen::VectorXcd& ev, double re_tol) {
    return static_cast<int>((ev.real().array() > re_tol).count());
}

SteadyState classify(const OdeSystem& system, const Vector& x, double re_tol) {
    SteadyState s;
    s.x = x;
    s.residual = inf_norm(system.rhs(x));
    s.jacobian = system.jacobian(x);
    s.eigenvalues = eigenvalues(s.jacobian);
    s.unstable_count = count_unstable(s.eigenvalues, re_tol);
    s.imaginary_axis = (s.eigenvalues.real().array().abs() <= re_tol).any();
    return s;
}

bool same_state(const Vector& a, const Vector& b) {
    return inf_norm(a - b) <= 1e-6 * (1.0 + std::max(inf_norm(a), inf_norm(b)));
}

namespace {

struct OrderKey {
    int unstable;
    std::size_t dominant;
    double peak;
};

OrderKey order_key(const SteadyState& s, std::size_t leading) {
    const std::size_t k = std::min<std::size_t>(leading, static_cast<std::size_t>(s.x.size()));
    double peak = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        peak = std::max(peak, s.x[static_cast<Eigen::Index>(i)]);
    }
    std::size_t dominant = 0;
    for (std::size_t i = 0; i < k; ++i) {
        if (s.x[static_cast<Eigen::Index>(i)] >= peak - 1e-9 * (1.0 + peak)) {
            dominant = i;
            break;
        }
    }
    return {s.unstable_count, dominant, peak};
}

}  // namespace

std::vector<SteadyState> find_steady_states(const OdeSystem& system,
                                            const SteadyStateOptions& options) {
    const std::size_t n = system.dimension();
    const auto& box = options.box ? *options.box : system.spec().domain;
    if (box.size() != n) {
        throw InputError("search box dimension does not match the model");
    }
    if (options.starts == 0) {
        throw InputError("at least one start is required");
    }
    HaltonSequence halton(n, options.seed);
    std::vector<Vector> roots;
    for (std::size_t s = 0; s < options.starts; ++s) {
        const auto p = scale_to_box(halton.next(), box);
        Vector x0 = Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(n));
        auto x = newton_solve(system, std::move(x0), box, options.newton);
        if (!x) {
            continue;
        }
        bool inside = true;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = (*x)[static_cast<Eigen::Index>(i)];
            inside = inside && v >= box[i].lo && v <= box[i].hi;
        }
        if (!inside) {
            continue;
        }
        if (std::none_of(roots.begin(), roots.end(),
                         [&](const Vector& r) { return same_state(r, *x); })) {
            roots.push_back(std::move(*x));
        }
    }

    std::vector<SteadyState> states;
    for (const auto& r : roots) {
        auto s = classify(system, r, options.re_tol);
        if (s.residual < options.newton.tol) {
            states.push_back(std::move(s));
        }
    }
    const std::size_t leading =
        system.spec().construction ? system.spec().construction->masters : n;
    std::stable_sort(states.begin(), states.end(), [&](const auto& a, const auto& b) {
        const auto ka = order_key(a, leading);
        const auto kb = order_key(b, leading);
        if (ka.unstable != kb.unstable) {
            return ka.unstable < kb.unstable;
        }
        if (ka.dominant != kb.dominant) {
            return ka.dominant < kb.dominant;
        }
        return ka.peak > kb.peak;
    });
    return states;
}

Vector lift_steady_state(const OdeSystem& high, const Vector& z, double tol) {
    const auto& info = high.spec().construction;
    if (!info) {
        throw InputError("model '" + high.spec().name + "' carries no construction data");
    }
    Vector x = lift_state(z, *info);
    const double r = inf_norm(high.rhs(x));
    if (!(r < tol)) {
        throw NumericalError("lifted state has residual " + format_number(r) +
                             ", the lift map does not fit this model");
    }
    return x;
}

}  // namespace msequiv
