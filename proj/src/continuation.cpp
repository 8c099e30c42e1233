#include "msequiv/continuation.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <optional>

namespace msequiv {

namespace {

/// F(x, p) together with its derivatives for one parameter.
class Homotopy {
public:
    Homotopy(const OdeSystem& system, std::size_t param) : system_(system), param_(param) {}

    [[nodiscard]] std::size_t dimension() const { return system_.dimension(); }

    [[nodiscard]] OdeSystem at(double p) const { return system_.with_parameter(param_, p); }

    [[nodiscard]] Vector residual(const Vector& y) const {
        const auto n = static_cast<Eigen::Index>(dimension());
        return at(y[n]).rhs(y.head(n));
    }

    /// [F_x  F_p]
    [[nodiscard]] Matrix jacobian(const Vector& y) const {
        const auto n = static_cast<Eigen::Index>(dimension());
        const OdeSystem s = at(y[n]);
        Matrix j(n, n + 1);
        j.leftCols(n) = s.jacobian(y.head(n));
        j.col(n) = s.parameter_derivative(y.head(n), param_);
        return j;
    }

    /// Unit tangent with tangent . reference > 0.
    [[nodiscard]] std::optional<Vector> tangent(const Vector& y, const Vector& reference) const {
        const auto n = static_cast<Eigen::Index>(dimension());
        Matrix m(n + 1, n + 1);
        m.topRows(n) = jacobian(y);
        m.row(n) = reference.transpose();
        Vector rhs = Vector::Zero(n + 1);
        rhs[n] = 1.0;
        Eigen::FullPivLU<Matrix> lu(m);
        if (!lu.isInvertible()) {
            return std::nullopt;
        }
        Vector t = lu.solve(rhs);
        if (!t.allFinite() || t.norm() == 0.0) {
            return std::nullopt;
        }
        t.normalize();
        if (t.dot(reference) < 0.0) {
            t = -t;
        }
        return t;
    }

    /// Newton on [F(y) = 0, t . (y - y_pred) = 0].
    [[nodiscard]] std::optional<Vector> correct(Vector y, const Vector& t, const NewtonOptions& o) const {
        const auto n = static_cast<Eigen::Index>(dimension());
        const Vector y_pred = y;
        try {
            for (int it = 0; it < o.max_iterations; ++it) {
                Vector g(n + 1);
                g.head(n) = residual(y);
                g[n] = t.dot(y - y_pred);
                if (!g.allFinite()) {
                    return std::nullopt;
                }
                if (g.head(n).lpNorm<Eigen::Infinity>() < o.tol && std::abs(g[n]) < 1e-9) {
                    return y;
                }
                Matrix m(n + 1, n + 1);
                m.topRows(n) = jacobian(y);
                m.row(n) = t.transpose();
                const Vector dy = Eigen::PartialPivLU<Matrix>(m).solve(-g);
                if (!dy.allFinite()) {
                    return std::nullopt;
                }
                y += dy;
            }
            if (residual(y).lpNorm<Eigen::Infinity>() < o.tol) {
                return y;
            }
        } catch (const EvalError&) {
        }
        return std::nullopt;
    }

    [[nodiscard]] BranchPoint point(const Vector& y, const Vector& t, double re_tol) const {
        const auto n = static_cast<Eigen::Index>(dimension());
        BranchPoint bp;
        bp.p = y[n];
        bp.x = y.head(n);
        const auto s = classify(at(bp.p), bp.x, re_tol);
        bp.unstable_count = s.unstable_count;
        bp.leading_re = s.eigenvalues.size() ? s.eigenvalues[0].real() : 0.0;
        bp.tangent_p = t[n];
        return bp;
    }

private:
    OdeSystem system_;
    std::size_t param_;
};

std::size_t param_index(const OdeSystem& system, const std::string& name) {
    const auto idx = system.spec().parameter_index(name);
    if (!idx) {
        throw InputError("unknown parameter '" + name + "'");
    }
    return *idx;
}

Vector stack(const Vector& x, double p) {
    Vector y(x.size() + 1);
    y.head(x.size()) = x;
    y[x.size()] = p;
    return y;
}

}  // namespace

Branch continue_branch(const OdeSystem& system, const std::string& param, double p_from,
                       double p_to, const Vector& seed, const ContinuationOptions& o) {
    const std::size_t pi = param_index(system, param);
    const auto n = static_cast<Eigen::Index>(system.dimension());
    if (seed.size() != n) {
        throw InputError("seed state has the wrong dimension");
    }
    if (p_from == p_to) {
        throw InputError("parameter range is empty");
    }
    const Homotopy h(system, pi);
    const double lo = std::min(p_from, p_to);
    const double hi = std::max(p_from, p_to);
    const double dir = p_to > p_from ? 1.0 : -1.0;

    NewtonOptions polish = o.corrector;
    polish.max_halvings = 40;
    std::vector<Interval> open_box(static_cast<std::size_t>(n), Interval{-1e300, 1e300});
    const auto x0 = newton_solve(h.at(p_from), seed, open_box, polish);
    if (!x0) {
        throw NumericalError("seed is not a steady state at " + param + " = " + format_number(p_from));
    }

    Branch b;
    b.parameter = param;
    Vector y = stack(*x0, p_from);
    Vector ref = Vector::Zero(n + 1);
    ref[n] = dir;
    auto t = h.tangent(y, ref);
    if (!t) {
        throw NumericalError("singular Jacobian at the seed; cannot start continuation");
    }
    b.points.push_back(h.point(y, *t, o.re_tol));

    double s = o.initial_step;
    int successes = 0;
    Vector direction = *t;
    while (true) {
        if (b.points.size() >= o.max_points) {
            b.stop_reason = "point limit";
            break;
        }
        std::optional<Vector> accepted;
        std::optional<Vector> t_new;
        while (s >= o.min_step) {
            const auto y_new = h.correct(y + s * direction, direction, o.corrector);
            if (y_new) {
                t_new = h.tangent(*y_new, *t);
                const Vector secant = (*y_new - y).normalized();
                const bool smooth = t_new && secant.dot(direction) >= o.min_tangent_cos &&
                                    (*y_new - y).norm() <= 2.0 * s;
                if (smooth) {
                    const auto bp = h.point(*y_new, *t_new, o.re_tol);
                    if (std::abs(bp.unstable_count - b.points.back().unstable_count) <= 1 ||
                        s <= 4.0 * o.min_step) {
                        accepted = y_new;
                        break;
                    }
                }
            }
            s *= 0.5;
            successes = 0;
        }
        if (!accepted) {
            b.stop_reason = "corrector failure";
            break;
        }
        const Vector y_old = y;
        y = *accepted;
        t = t_new;
        direction = (y - y_old).normalized();
        b.points.push_back(h.point(y, *t, o.re_tol));
        if (++successes >= o.grow_after) {
            s = std::min(s * o.growth, o.max_step);
            successes = 0;
        }
        if (y[n] < lo || y[n] > hi) {
            b.points.pop_back();
            // Land exactly on the boundary the branch crossed.
            const double edge = y[n] < lo ? lo : hi;
            const double w = (edge - y_old[n]) / (y[n] - y_old[n]);
            const Vector guess = (1.0 - w) * y_old.head(n) + w * y.head(n);
            if (const auto xe = newton_solve(h.at(edge), guess, open_box, polish)) {
                const Vector ye = stack(*xe, edge);
                if (const auto te = h.tangent(ye, *t)) {
                    b.points.push_back(h.point(ye, *te, o.re_tol));
                }
            }
            b.stop_reason = "left parameter range";
            break;
        }
    }

    b.folds = detect_folds(system, b, o);
    for (std::size_t k = 0; k + 1 < b.points.size(); ++k) {
        const int u0 = b.points[k].unstable_count;
        const int u1 = b.points[k + 1].unstable_count;
        if (u0 == u1) {
            continue;
        }
        const bool explained = std::any_of(b.folds.begin(), b.folds.end(), [&](const FoldPoint& f) {
            return f.segment == k || f.segment + 1 == k || f.segment == k + 1;
        });
        if (!explained) {
            const auto& a = b.points[k];
            const auto& c = b.points[k + 1];
            const double w = a.leading_re == c.leading_re
                                 ? 0.5
                                 : std::clamp(a.leading_re / (a.leading_re - c.leading_re), 0.0, 1.0);
            b.other.push_back({(1 - w) * a.p + w * c.p, (1 - w) * a.x + w * c.x, k, u0, u1});
        }
    }
    return b;
}

std::vector<FoldPoint> detect_folds(const OdeSystem& system, const Branch& b,
                                    const ContinuationOptions& o) {
    std::vector<FoldPoint> folds;
    if (b.points.size() < 3) {
        return folds;
    }
    const Homotopy h(system, param_index(system, b.parameter));
    const auto n = static_cast<Eigen::Index>(system.dimension());
    for (std::size_t k = 0; k + 1 < b.points.size(); ++k) {
        const auto& pa = b.points[k];
        const auto& pb = b.points[k + 1];
        if (pa.tangent_p == 0.0 || (pa.tangent_p > 0.0) == (pb.tangent_p > 0.0)) {
            continue;
        }
        const Vector ya = stack(pa.x, pa.p);
        const Vector yb = stack(pb.x, pb.p);
        const Vector chord = yb - ya;
        const double len = chord.norm();
        const Vector dir = chord / len;
        Vector ref = Vector::Zero(n + 1);
        ref[n] = pa.tangent_p > 0.0 ? 1.0 : -1.0;
        const auto ta = h.tangent(ya, ref);

        // Bisect on arclength along the chord, projecting back onto the curve.
        double s0 = 0.0, s1 = len;
        Vector y0 = ya, y1 = yb;
        for (int it = 0; it < 200 && std::abs(y1[n] - y0[n]) >= o.fold_tol; ++it) {
            const double sm = 0.5 * (s0 + s1);
            const auto ym = h.correct(ya + sm * dir, dir, o.corrector);
            if (!ym || !ta) {
                break;
            }
            const auto tm = h.tangent(*ym, *ta);
            if (!tm) {
                y0 = y1 = *ym;
                break;
            }
            if (((*tm)[n] > 0.0) == (pa.tangent_p > 0.0)) {
                s0 = sm;
                y0 = *ym;
            } else {
                s1 = sm;
                y1 = *ym;
            }
        }
        const Vector yf = 0.5 * (y0 + y1);
        folds.push_back({yf[n], yf.head(n), k, pa.unstable_count, pb.unstable_count});
    }
    return folds;
}

}  // namespace msequiv
