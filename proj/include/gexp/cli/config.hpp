#pragma once

// Scenario configuration: a single JSON document, parsed strictly.

#include "gexp/lattice.hpp"
#include "gexp/risk_measure.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gexp::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Task { solve, axioms, domination, dual, penalize, represent, converge };
std::string to_string(Task task);
std::optional<Task> parse_task(const std::string& name);

struct TreeSpec {
    double horizon = 1.0;
    int steps = 0;
    int depth_cap = kDefaultDepthCap;
    /// "auto", "full" or "recombining".
    std::string layout = "auto";
};

struct GeneratorSpec {
    BuiltinKind kind = BuiltinKind::quadratic_upper;
    BuiltinParams params;
};

struct DrmSpec {
    /// "generator", "entropy" or "planted_nonmonotone".
    std::string source;
    double nu = 0.0;
    std::optional<GeneratorSpec> generator;
};

struct ScenarioConfig {
    std::optional<Task> task;
    TreeSpec tree;
    std::optional<DrmSpec> drm;
    /// Validated claim specifications; see claims().
    std::vector<nlohmann::json> claim_specs;
    /// Task parameters, validated by the task.
    nlohmann::json params = nlohmann::json::object();
    std::uint64_t seed = 1;
    std::string output;
    /// The document as read.
    nlohmann::json echo;

    /// Claims in order; random families without their own seed use `seed`.
    std::vector<Claim> claims() const;
};

/// Parses configuration text. Syntax errors carry line and column; schema
/// errors carry the JSON pointer of the offending value.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

Generator build_generator(const GeneratorSpec& spec);
DynamicRiskMeasure build_drm(const DrmSpec& spec, const ScenarioTree& tree);

/// Strict reader for one JSON object: typed getters record the keys they
/// consume and finish() rejects whatever is left.
class ObjectReader {
public:
    ObjectReader(const nlohmann::json& object, std::string pointer);

    bool has(const std::string& key) const;
    double number(const std::string& key, std::optional<double> fallback = std::nullopt);
    long long integer(const std::string& key, std::optional<long long> fallback = std::nullopt);
    std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt);
    bool boolean(const std::string& key, std::optional<bool> fallback = std::nullopt);
    std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback = std::nullopt);
    /// Raw access to a nested value; marks the key as consumed.
    const nlohmann::json& child(const std::string& key);
    std::string pointer(const std::string& key) const { return pointer_ + "/" + key; }
    void finish() const;

    [[noreturn]] void fail(const std::string& key, const std::string& message) const;

private:
    const nlohmann::json* get(const std::string& key);

    const nlohmann::json& object_;
    std::string pointer_;
    std::vector<std::string> used_;
};

}  // namespace gexp::cli
