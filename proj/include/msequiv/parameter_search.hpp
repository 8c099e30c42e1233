#pragma once

// Search for module rates K and mixing weights eps that make the constructed
// model pass the frequency-domain comparison at every low-dimensional steady
// state.

#include "msequiv/analysis.hpp"
#include "msequiv/construction.hpp"
#include "msequiv/frequency.hpp"

#include <optional>
#include <string>
#include <vector>

namespace msequiv {

enum class TubePolicy {
    /// Every state needs sup|det_high - det_low| < min|det_low|.
    strict,
    /// Equal winding numbers suffice.
    winding,
};

struct ParameterSearchOptions {
    /// Starting K; all ones when absent.
    std::optional<std::vector<double>> initial_rates;
    double initial_eps = 1e-3;
    double max_scale = 1099511627776.0;  // 2^40
    double eps_floor = 1e-12;
    std::size_t positivity_samples = 4096;
    TubePolicy tube = TubePolicy::strict;
    SteadyStateOptions steady;
    NyquistOptions nyquist;
    ConstructionOptions construction;
};

struct ParameterChoice {
    std::vector<double> rates;
    std::vector<double> eps;
    double scale = 1.0;  // factor applied to the initial rates
    std::size_t eps_halvings = 0;
    std::vector<TubeReport> tubes;  // one per low-dimensional steady state
    std::vector<std::string> log;   // one line per rejected candidate
};

/// Raised when the K cap or eps floor is reached. `criterion` names the
/// last requirement that failed.
class SearchExhausted : public NumericalError {
public:
    SearchExhausted(const std::string& message, std::string criterion, std::vector<std::string> log);
    [[nodiscard]] const std::string& criterion() const noexcept { return criterion_; }
    [[nodiscard]] const std::vector<std::string>& log() const noexcept { return log_; }

private:
    std::string criterion_;
    std::vector<std::string> log_;
};

/// Smallest sampled mu component over the high-dimensional box and the
/// given lifted states (consumed components only).
double min_auxiliary_component(const HighDimModel& model, std::size_t samples,
                               const std::vector<Vector>& extra_points, std::uint64_t seed = 0);

/// Tube comparison at every low-dimensional steady state.
std::vector<TubeReport> tube_reports(const OdeSystem& low, const HighDimModel& model,
                                     const std::vector<Vector>& low_states,
                                     const NyquistOptions& options = {});

ParameterChoice choose_parameters(const ModelSpec& low, const SignMatrix& sa_high,
                                  const ParameterSearchOptions& options = {});

/// Tube reports for K scaled by each factor (rows) at each state (columns).
std::vector<std::vector<TubeReport>> k_sweep(const ModelSpec& low, const SignMatrix& sa_high,
                                             const std::vector<double>& rates,
                                             const std::vector<double>& eps,
                                             const std::vector<double>& scales,
                                             const std::vector<Vector>& low_states,
                                             const NyquistOptions& options = {});

}  // namespace msequiv
