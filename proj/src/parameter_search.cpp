#include "msequiv/parameter_search.hpp"

#include "msequiv/sampling.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace msequiv {

SearchExhausted::SearchExhausted(const std::string& message, std::string criterion,
                                 std::vector<std::string> log)
    : NumericalError(message), criterion_(std::move(criterion)), log_(std::move(log)) {}

double min_auxiliary_component(const HighDimModel& model, std::size_t samples,
                               const std::vector<Vector>& extra_points, std::uint64_t seed) {
    const std::size_t n = model.assignment.masters;
    const std::size_t total = model.spec.dimension();
    double lowest = std::numeric_limits<double>::infinity();
    auto scan = [&](const Vector& x) {
        const Matrix mu = model.auxiliary(x);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t nu = 0; nu < n; ++nu) {
                if (model.sa_low(i, nu) != 0) {
                    lowest = std::min(lowest, mu(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(nu)));
                }
            }
        }
    };
    HaltonSequence halton(total, seed);
    for (std::size_t s = 0; s < samples; ++s) {
        const auto p = scale_to_box(halton.next(), model.spec.domain);
        scan(Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(total)));
    }
    for (const auto& x : extra_points) {
        scan(x);
    }
    return lowest;
}

std::vector<TubeReport> tube_reports(const OdeSystem& low, const HighDimModel& model,
                                     const std::vector<Vector>& low_states,
                                     const NyquistOptions& options) {
    const OdeSystem high = model.system();
    std::vector<TubeReport> out;
    for (const auto& z : low_states) {
        out.push_back(compare_nyquist(loopbreak(low, z), loopbreak(high, model.lift(z)), options));
    }
    return out;
}

namespace {

std::vector<double> scaled(const std::vector<double>& v, double f) {
    std::vector<double> out(v);
    for (auto& x : out) {
        x *= f;
    }
    return out;
}

std::string describe(const std::vector<double>& k) {
    std::ostringstream os;
    for (std::size_t i = 0; i < k.size(); ++i) {
        os << (i ? "," : "") << format_number(k[i]);
    }
    return os.str();
}

}  // namespace

ParameterChoice choose_parameters(const ModelSpec& low, const SignMatrix& sa_high,
                                  const ParameterSearchOptions& o) {
    const std::size_t n = low.dimension();
    const std::size_t modules = sa_high.rows() >= n ? sa_high.rows() - n : 0;
    const std::vector<double> base = o.initial_rates ? *o.initial_rates : std::vector<double>(modules, 1.0);
    if (base.size() != modules) {
        throw InputError("initial K needs " + std::to_string(modules) + " entries");
    }

    const OdeSystem low_sys(low);
    std::vector<Vector> low_states;
    for (const auto& s : find_steady_states(low_sys, o.steady)) {
        low_states.push_back(s.x);
    }

    ParameterChoice choice;
    std::string failed = "none";
    for (double scale = 1.0; scale <= o.max_scale; scale *= 2.0) {
        const auto rates = scaled(base, scale);
        std::vector<double> eps(n, o.initial_eps);
        std::optional<HighDimModel> model;
        try {
            model = assemble_high_dim(low, sa_high, rates, eps, o.construction);
        } catch (const InfeasibleGainError& e) {
            failed = "module stability and positive gains";
            choice.log.push_back("K=" + describe(rates) + ": " + e.what());
            if (modules == 0) {
                throw;
            }
            continue;
        }

        std::vector<Vector> lifted;
        for (const auto& z : low_states) {
            lifted.push_back(model->lift(z));
        }
        std::size_t halvings = 0;
        bool positive = false;
        while (true) {
            const double m = min_auxiliary_component(*model, o.positivity_samples, lifted);
            if (m > 0.0) {
                positive = true;
                break;
            }
            choice.log.push_back("K=" + describe(rates) + " eps=" + format_number(eps.front()) +
                                 ": auxiliary map reaches " + format_number(m));
            if (eps.front() * 0.5 < o.eps_floor) {
                break;
            }
            for (auto& e : eps) {
                e *= 0.5;
            }
            ++halvings;
            model = assemble_high_dim(low, sa_high, rates, eps, o.construction);
        }
        if (!positive) {
            throw SearchExhausted("eps reached its floor without a positive auxiliary map",
                                  "positive auxiliary map", choice.log);
        }

        std::vector<TubeReport> tubes;
        try {
            tubes = tube_reports(low_sys, *model, low_states, o.nyquist);
        } catch (const NumericalError& e) {
            failed = "Nyquist comparison";
            choice.log.push_back("K=" + describe(rates) + ": " + e.what());
            continue;
        }
        bool ok = true;
        for (std::size_t r = 0; r < tubes.size(); ++r) {
            const auto& t = tubes[r];
            const bool pass = o.tube == TubePolicy::strict ? t.within_tube
                                                           : t.winding_low == t.winding_high;
            if (!pass) {
                ok = false;
                choice.log.push_back("K=" + describe(rates) + ": state " + std::to_string(r + 1) +
                                     (o.tube == TubePolicy::strict
                                          ? " outside the eps-tube (deviation " +
                                                format_number(t.deviation) + " >= eps " +
                                                format_number(t.eps) + ")"
                                          : " has different winding numbers"));
            }
        }
        if (!ok) {
            failed = o.tube == TubePolicy::strict ? "eps-tube" : "winding numbers";
            if (modules == 0) {
                break;
            }
            continue;
        }
        choice.rates = rates;
        choice.eps = eps;
        choice.scale = scale;
        choice.eps_halvings = halvings;
        choice.tubes = std::move(tubes);
        return choice;
    }
    throw SearchExhausted("no K up to the scaling cap satisfies every criterion; last failure: " +
                              failed,
                          failed, choice.log);
}

std::vector<std::vector<TubeReport>> k_sweep(const ModelSpec& low, const SignMatrix& sa_high,
                                             const std::vector<double>& rates,
                                             const std::vector<double>& eps,
                                             const std::vector<double>& scales,
                                             const std::vector<Vector>& low_states,
                                             const NyquistOptions& options) {
    const OdeSystem low_sys(low);
    std::vector<std::vector<TubeReport>> out;
    for (double f : scales) {
        const auto model = assemble_high_dim(low, sa_high, scaled(rates, f), eps);
        out.push_back(tube_reports(low_sys, model, low_states, options));
    }
    return out;
}

}  // namespace msequiv
