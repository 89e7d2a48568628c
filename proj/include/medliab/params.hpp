#pragma once

// Model primitives for the liability/staffing model: arrival and service
// rates, accuracies, loss severity, cost coefficients and physician wage.

#include <array>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace medliab {

/// Diagnostic mode. A = AI-assisted confirmation, I = independent diagnosis.
enum class Mode { A, I };

[[nodiscard]] std::string_view to_string(Mode m) noexcept;
[[nodiscard]] Mode parse_mode(std::string_view s);

/// All rates are per hour, all money is dollars per hour (loss is dollars per error).
/// Defaults are the calibrated baseline.
struct ModelParams {
    double lambda = 50.0;   // patient arrival rate
    double mu_a = 12.0;     // Mode-A service rate per physician
    double mu_i = 6.0;      // Mode-I service rate per physician
    double q = 0.90;        // AI-assisted accuracy
    double h = 0.95;        // independent accuracy
    double big_l = 2000.0;  // expected loss per diagnostic error
    double c_w = 150.0;     // waiting cost per patient-hour
    double c_n = 200.0;     // staffing cost per physician-hour
    double kappa = 2500.0;  // compliance coefficient at theta = 1
    double k_a = 50.0;      // Mode-A disutility
    double k_i = 110.0;     // Mode-I disutility
    double w = 300.0;       // wage; never affects mode choice

    [[nodiscard]] static constexpr ModelParams baseline() noexcept { return {}; }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

inline constexpr std::array<std::string_view, 12> kParamNames = {
    "lambda", "mu_a", "mu_i", "q", "h", "big_l", "c_w", "c_n", "kappa", "k_a", "k_i", "w"};

/// Field access by config key. Throws std::invalid_argument on unknown names.
[[nodiscard]] double& field(ModelParams& p, std::string_view name);
[[nodiscard]] double field(const ModelParams& p, std::string_view name);

/// Raised by validate(); carries one message per violated invariant.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(std::vector<std::string> violations);
    [[nodiscard]] const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Returns p unchanged when every ordering assumption holds, otherwise throws
/// ValidationError listing each violation.
ModelParams validate(const ModelParams& p);

struct ModeAttrs {
    double service_rate;
    double error_prob;
    double disutility;
};

[[nodiscard]] ModeAttrs mode_attrs(Mode m, const ModelParams& p) noexcept;

// ---------------------------------------------------------------------------
// Configuration files
// ---------------------------------------------------------------------------

/// Parse or I/O failure in a config file; message carries "<source>:<line>: ...".
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scenario knobs that may also live in a config file.
struct ScenarioDefaults {
    double alpha = 0.5;
    double theta_floor = 0.3;

    friend bool operator==(const ScenarioDefaults&, const ScenarioDefaults&) = default;
};

struct ConfigFile {
    ModelParams params;
    ScenarioDefaults scenario;
};

/// `key = value` lines, `#` comments. Missing keys keep baseline values; unknown
/// keys, duplicates and malformed numbers are errors. The result is validated.
ConfigFile parse_config(std::istream& in, std::string_view source_name = "<config>");
ConfigFile load_config(const std::filesystem::path& path);

/// Writes every key, 17 significant digits, so parse_config(write_config(x)) == x.
std::string write_config(const ConfigFile& cfg);

}  // namespace medliab
