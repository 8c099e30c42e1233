#include "msequiv/equivalence.hpp"

#include "msequiv/construction.hpp"
#include "msequiv/sampling.hpp"
#include "msequiv/structure.hpp"

#include <algorithm>

namespace msequiv {

namespace {

void sign_check(const OdeSystem& high, const ConstructionInfo& info,
                const EquivalenceOptions& opt, EquivalenceReport& r) {
    const SignMatrix expected(info.sign_matrix);
    const std::size_t n = high.dimension();
    HaltonSequence halton(n, opt.steady.seed);
    std::size_t bad = 0;
    for (std::size_t s = 0; s < opt.sign_samples; ++s) {
        const auto p = scale_to_box(halton.next(), high.spec().domain);
        const Matrix jac = high.interaction_jacobian(Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(n)));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double v = jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                const int sg = (v > 0.0) - (v < 0.0);
                if (sg != expected(i, j)) {
                    ++bad;
                    if (r.sign_mismatches.size() < 10) {
                        r.sign_mismatches.push_back({i, j, expected(i, j), sg, p});
                    }
                }
            }
        }
    }
    r.sign_points = opt.sign_samples;
    r.sign_check = bad == 0;
}

}  // namespace

EquivalenceReport check_equivalence(const OdeSystem& low, const OdeSystem& high,
                                    const EquivalenceOptions& options) {
    const auto& info = high.spec().construction;
    if (!info) {
        throw InputError("high-dimensional model carries no construction data");
    }
    if (info->masters != low.dimension()) {
        throw InputError("construction has " + std::to_string(info->masters) +
                         " masters but the low-dimensional model has dimension " +
                         std::to_string(low.dimension()));
    }
    EquivalenceReport r;
    sign_check(high, *info, options, r);

    const auto low_states = find_steady_states(low, options.steady);
    SteadyStateOptions high_opt = options.steady;
    high_opt.box.reset();
    const auto high_states = find_steady_states(high, high_opt);
    r.low_states = low_states.size();
    r.high_states = high_states.size();

    r.lift_check = true;
    r.stability_check = true;
    std::vector<Vector> lifted;
    for (std::size_t k = 0; k < low_states.size(); ++k) {
        const auto& zs = low_states[k];
        PairRecord p;
        p.z = zs.x;
        p.low_residual = zs.residual;
        p.low_unstable = zs.unstable_count;
        p.x = lift_state(zs.x, *info);
        p.lift_residual = high.rhs(p.x).lpNorm<Eigen::Infinity>();
        const bool lift_ok = p.lift_residual < options.lift_tol;
        const auto xs = classify(high, p.x, options.steady.re_tol);
        p.high_unstable = xs.unstable_count;
        p.imaginary_axis = zs.imaginary_axis || xs.imaginary_axis;
        if (p.imaginary_axis) {
            r.inconclusive.push_back(k);
        }
        if (options.nyquist && !p.imaginary_axis) {
            try {
                p.nyquist = compare_nyquist(loopbreak(low, zs.x), loopbreak(high, p.x),
                                            options.nyquist_options);
            } catch (const NumericalError& e) {
                p.nyquist_error = e.what();
            }
        }
        p.ok = lift_ok && p.low_unstable == p.high_unstable && !p.imaginary_axis;
        r.lift_check = r.lift_check && lift_ok;
        r.stability_check = r.stability_check && p.low_unstable == p.high_unstable;
        lifted.push_back(p.x);
        r.pairs.push_back(std::move(p));
    }

    r.injective = true;
    for (std::size_t a = 0; a < lifted.size(); ++a) {
        for (std::size_t b = a + 1; b < lifted.size(); ++b) {
            if (same_state(lifted[a], lifted[b])) {
                r.injective = false;
            }
        }
    }
    for (const auto& hs : high_states) {
        if (std::none_of(lifted.begin(), lifted.end(),
                         [&](const Vector& x) { return same_state(x, hs.x); })) {
            ++r.unmatched_high_states;
        }
    }
    r.bijection = r.injective && r.unmatched_high_states == 0 && r.high_states == r.low_states;

    r.verdict = r.sign_check && r.lift_check && r.bijection && r.stability_check &&
                r.inconclusive.empty() && !r.pairs.empty();
    return r;
}

}  // namespace msequiv
