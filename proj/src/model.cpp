#include "msequiv/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace msequiv {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "msequiv-model";
constexpr int kVersion = 1;

}  // namespace

ModelError::ModelError(std::string path, const std::string& message)
    : InputError(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

std::vector<std::string> ModelSpec::parameter_names() const {
    std::vector<std::string> names;
    names.reserve(parameters.size());
    for (const auto& p : parameters) {
        names.push_back(p.name);
    }
    return names;
}

std::vector<double> ModelSpec::parameter_values() const {
    std::vector<double> values;
    values.reserve(parameters.size());
    for (const auto& p : parameters) {
        values.push_back(p.value);
    }
    return values;
}

std::optional<std::size_t> ModelSpec::parameter_index(const std::string& pname) const {
    for (std::size_t i = 0; i < parameters.size(); ++i) {
        if (parameters[i].name == pname) {
            return i;
        }
    }
    return std::nullopt;
}

std::string ModelSpec::interaction_text(std::size_t i) const {
    const auto pnames = parameter_names();
    return to_string(interactions.at(i), variables, pnames);
}

void ModelSpec::set_parameter(const std::string& pname, double value) {
    const auto idx = parameter_index(pname);
    if (!idx) {
        throw ModelError("parameters", "unknown parameter '" + pname + "'");
    }
    parameters[*idx].value = value;
}

void ModelSpec::validate() const {
    const std::size_t n = dimension();
    if (n == 0) {
        throw ModelError("dimension", "must be at least 1");
    }
    std::set<std::string> names;
    for (std::size_t i = 0; i < n; ++i) {
        if (variables[i].empty() || !names.insert(variables[i]).second) {
            throw ModelError("variables[" + std::to_string(i) + "]",
                             "empty or duplicate name '" + variables[i] + "'");
        }
    }
    for (std::size_t i = 0; i < parameters.size(); ++i) {
        if (parameters[i].name.empty() || !names.insert(parameters[i].name).second) {
            throw ModelError("parameters[" + std::to_string(i) + "].name",
                             "empty or duplicate name '" + parameters[i].name + "'");
        }
        if (!std::isfinite(parameters[i].value)) {
            throw ModelError("parameters[" + std::to_string(i) + "].default", "not finite");
        }
    }
    if (interactions.size() != n) {
        throw ModelError("interactions", "expected " + std::to_string(n) + " expressions, got " +
                                             std::to_string(interactions.size()));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (variable_extent(interactions[i]) > n) {
            throw ModelError("interactions[" + std::to_string(i) + "]",
                             "references a variable beyond the model dimension");
        }
        if (parameter_extent(interactions[i]) > parameters.size()) {
            throw ModelError("interactions[" + std::to_string(i) + "]",
                             "references an undeclared parameter");
        }
    }
    if (degradation.size() != n) {
        throw ModelError("degradation", "expected " + std::to_string(n) + " rates");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(degradation[i] > 0.0) || !std::isfinite(degradation[i])) {
            throw ModelError("degradation[" + std::to_string(i) + "]",
                             "rate must be positive, got " + format_number(degradation[i]));
        }
    }
    if (domain.size() != n) {
        throw ModelError("domain", "expected " + std::to_string(n) + " intervals");
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto& d = domain[i];
        if (!(d.lo >= 0.0) || !(d.hi > d.lo) || !std::isfinite(d.hi)) {
            throw ModelError("domain[" + std::to_string(i) + "]",
                             "need 0 <= lo < hi, got [" + format_number(d.lo) + ", " +
                                 format_number(d.hi) + "]");
        }
    }
    if (construction) {
        const auto& c = *construction;
        if (c.masters == 0 || c.masters > n) {
            throw ModelError("construction.masters", "must be in [1, dimension]");
        }
        if (c.sign_matrix.size() != n) {
            throw ModelError("construction.sign_matrix", "must have dimension rows");
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (c.sign_matrix[i].size() != n) {
                throw ModelError("construction.sign_matrix[" + std::to_string(i) + "]",
                                 "must have dimension entries");
            }
        }
        if (c.module_rates.size() != n - c.masters) {
            throw ModelError("construction.module_rates", "must have dimension - masters entries");
        }
        if (c.eps.size() != c.masters) {
            throw ModelError("construction.eps", "must have masters entries");
        }
        if (c.lift_gains.size() != n || c.master_of.size() != n) {
            throw ModelError("construction", "lift_gains and master_of need dimension entries");
        }
    }
}

ModelSpec make_model(std::string name, std::vector<std::string> variables,
                     std::vector<Parameter> parameters,
                     const std::vector<std::string>& interactions, std::vector<double> degradation,
                     std::vector<Interval> domain) {
    ModelSpec spec;
    spec.name = std::move(name);
    spec.variables = std::move(variables);
    spec.parameters = std::move(parameters);
    const auto pnames = spec.parameter_names();
    for (std::size_t i = 0; i < interactions.size(); ++i) {
        try {
            spec.interactions.push_back(parse_expression(interactions[i], spec.variables, pnames));
        } catch (const ParseError& e) {
            throw ModelError("interactions[" + std::to_string(i) + "]", e.what());
        }
    }
    spec.degradation = std::move(degradation);
    spec.domain = std::move(domain);
    spec.validate();
    return spec;
}

json to_json(const ModelSpec& spec) {
    json doc;
    doc["format"] = kFormat;
    doc["version"] = kVersion;
    doc["name"] = spec.name;
    doc["dimension"] = spec.dimension();
    doc["variables"] = spec.variables;
    json params = json::array();
    for (const auto& p : spec.parameters) {
        params.push_back({{"name", p.name}, {"default", p.value}});
    }
    doc["parameters"] = params;
    json inter = json::array();
    for (std::size_t i = 0; i < spec.interactions.size(); ++i) {
        inter.push_back(spec.interaction_text(i));
    }
    doc["interactions"] = inter;
    doc["degradation"] = spec.degradation;
    json dom = json::array();
    for (const auto& d : spec.domain) {
        dom.push_back({d.lo, d.hi});
    }
    doc["domain"] = dom;
    if (spec.construction) {
        const auto& c = *spec.construction;
        json master_of = json::array();
        for (const auto& m : c.master_of) {
            master_of.push_back(m ? json(*m + 1) : json(nullptr));
        }
        doc["construction"] = {
            {"masters", c.masters},         {"sign_matrix", c.sign_matrix},
            {"module_rates", c.module_rates}, {"eps", c.eps},
            {"lift_gains", c.lift_gains},   {"master_of", master_of},
        };
    }
    return doc;
}

namespace {

const json& require(const json& doc, const char* key) {
    if (!doc.is_object() || !doc.contains(key)) {
        throw ModelError(key, "missing required field");
    }
    return doc.at(key);
}

template <typename T>
T read_as(const json& value, const std::string& path) {
    try {
        return value.get<T>();
    } catch (const json::exception& e) {
        throw ModelError(path, std::string("wrong type: ") + e.what());
    }
}

}  // namespace

ModelSpec model_from_json(const json& doc) {
    if (!doc.is_object()) {
        throw ModelError("", "model document must be an object");
    }
    if (doc.contains("format") && doc.at("format") != kFormat) {
        throw ModelError("format", "expected '" + std::string(kFormat) + "'");
    }
    if (doc.contains("version") && doc.at("version") != kVersion) {
        throw ModelError("version", "unsupported schema version");
    }
    ModelSpec spec;
    spec.name = doc.value("name", std::string{});
    const auto dim = read_as<std::size_t>(require(doc, "dimension"), "dimension");
    spec.variables = read_as<std::vector<std::string>>(require(doc, "variables"), "variables");
    if (spec.variables.size() != dim) {
        throw ModelError("variables", "length differs from dimension");
    }
    const auto& params = require(doc, "parameters");
    if (!params.is_array()) {
        throw ModelError("parameters", "must be a list");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        const std::string path = "parameters[" + std::to_string(i) + "]";
        const auto& p = params[i];
        if (!p.is_object() || !p.contains("name") || !p.contains("default")) {
            throw ModelError(path, "needs 'name' and 'default'");
        }
        spec.parameters.push_back({read_as<std::string>(p.at("name"), path + ".name"),
                                   read_as<double>(p.at("default"), path + ".default")});
    }
    const auto texts = read_as<std::vector<std::string>>(require(doc, "interactions"),
                                                         "interactions");
    const auto pnames = spec.parameter_names();
    for (std::size_t i = 0; i < texts.size(); ++i) {
        try {
            spec.interactions.push_back(parse_expression(texts[i], spec.variables, pnames));
        } catch (const ParseError& e) {
            throw ModelError("interactions[" + std::to_string(i) + "]", e.what());
        }
    }
    spec.degradation = read_as<std::vector<double>>(require(doc, "degradation"), "degradation");
    const auto& dom = require(doc, "domain");
    if (!dom.is_array()) {
        throw ModelError("domain", "must be a list of [lo, hi]");
    }
    for (std::size_t i = 0; i < dom.size(); ++i) {
        const auto pair = read_as<std::vector<double>>(dom[i], "domain[" + std::to_string(i) + "]");
        if (pair.size() != 2) {
            throw ModelError("domain[" + std::to_string(i) + "]", "must be [lo, hi]");
        }
        spec.domain.push_back({pair[0], pair[1]});
    }
    if (doc.contains("construction")) {
        const auto& c = doc.at("construction");
        ConstructionInfo info;
        info.masters = read_as<std::size_t>(require(c, "masters"), "construction.masters");
        info.sign_matrix = read_as<std::vector<std::vector<int>>>(require(c, "sign_matrix"),
                                                                  "construction.sign_matrix");
        info.module_rates = read_as<std::vector<double>>(require(c, "module_rates"),
                                                         "construction.module_rates");
        info.eps = read_as<std::vector<double>>(require(c, "eps"), "construction.eps");
        info.lift_gains = read_as<std::vector<double>>(require(c, "lift_gains"),
                                                       "construction.lift_gains");
        const auto& mo = require(c, "master_of");
        for (std::size_t i = 0; i < mo.size(); ++i) {
            if (mo[i].is_null()) {
                info.master_of.emplace_back(std::nullopt);
            } else {
                const auto one_based = read_as<std::size_t>(
                    mo[i], "construction.master_of[" + std::to_string(i) + "]");
                if (one_based == 0) {
                    throw ModelError("construction.master_of[" + std::to_string(i) + "]",
                                     "indices are 1-based");
                }
                info.master_of.emplace_back(one_based - 1);
            }
        }
        spec.construction = std::move(info);
    }
    spec.validate();
    return spec;
}

ModelSpec load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open model file '" + path.string() + "'");
    }
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ModelError("", "'" + path.string() + "' is not a valid document: " + e.what());
    }
    return model_from_json(doc);
}

void save_model(const ModelSpec& spec, const std::filesystem::path& path) {
    spec.validate();
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write model file '" + path.string() + "'");
    }
    out << to_json(spec).dump(2) << '\n';
}

}  // namespace msequiv
