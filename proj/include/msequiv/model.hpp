#pragma once

#include "msequiv/expr.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace msequiv {

struct Parameter {
    std::string name;
    double value = 0.0;

    friend bool operator==(const Parameter&, const Parameter&) = default;
};

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Schema violation or semantic error in a model document. `path` names the
/// offending field, e.g. "degradation[1]".
class ModelError : public InputError {
public:
    ModelError(std::string path, const std::string& message);
    [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Extra data carried by constructed high-dimensional models so that the lift
/// map and structure can be recovered from a model file alone.
struct ConstructionInfo {
    std::size_t masters = 0;
    std::vector<std::vector<int>> sign_matrix;
    std::vector<double> module_rates;        // K_{n+1..N}
    std::vector<double> eps;                 // eps_{1..n}
    std::vector<double> lift_gains;          // gamma_{j,m_j}; 1 for masters
    std::vector<std::optional<std::size_t>> master_of;  // per state, 0-based

    friend bool operator==(const ConstructionInfo&, const ConstructionInfo&) = default;
};

/// n-dimensional model  dz/dt = a(z) - k z  with rational interaction rates.
struct ModelSpec {
    std::string name;
    std::vector<std::string> variables;
    std::vector<Parameter> parameters;
    std::vector<Expr> interactions;
    std::vector<double> degradation;
    std::vector<Interval> domain;
    std::optional<ConstructionInfo> construction;

    [[nodiscard]] std::size_t dimension() const noexcept { return variables.size(); }
    [[nodiscard]] std::vector<std::string> parameter_names() const;
    [[nodiscard]] std::vector<double> parameter_values() const;
    [[nodiscard]] std::optional<std::size_t> parameter_index(const std::string& name) const;
    [[nodiscard]] std::string interaction_text(std::size_t i) const;

    /// Sets a parameter default; throws ModelError for unknown names.
    void set_parameter(const std::string& name, double value);

    /// Checks every invariant; throws ModelError naming the first bad field.
    void validate() const;

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Convenience constructor: parses each interaction against `variables` and
/// the parameter names.
ModelSpec make_model(std::string name, std::vector<std::string> variables,
                     std::vector<Parameter> parameters,
                     const std::vector<std::string>& interactions, std::vector<double> degradation,
                     std::vector<Interval> domain);

nlohmann::json to_json(const ModelSpec& spec);
ModelSpec model_from_json(const nlohmann::json& doc);

ModelSpec load_model(const std::filesystem::path& path);
void save_model(const ModelSpec& spec, const std::filesystem::path& path);

}  // namespace msequiv
