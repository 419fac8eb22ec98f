#pragma once

#include "collapse_kaon/core.hpp"
#include "collapse_kaon/montecarlo.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace collapse_kaon {

/// Config validation failure; `line` is 0 when no source position applies.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, int line = 0);
    int line() const { return line_; }

private:
    int line_;
};

enum class OutputFormat { Csv, Json };

/**
 * Everything a batch run needs. `scheme` empty means "auto": pick the scheme
 * that realizes each theta0 (0 -> left, 1/2 -> midpoint, 1 -> right).
 */
struct RunConfig {
    PhysicalParams params;
    std::vector<double> theta0{0.0, 0.5, 1.0};
    double t_max = 1.0;
    int t_steps = 10;
    std::optional<montecarlo::Scheme> scheme;
    std::size_t trajectories = 2000;
    double dt = 1e-3;
    std::uint64_t master_seed = 20150101;
    montecarlo::GridSpec grid{128, 0.0};
    unsigned threads = 0;
    std::string output_path = "-";
    OutputFormat format = OutputFormat::Csv;

    /// Throws ConfigError for any field outside its domain.
    void validate() const;

    /// t_k = k t_max / t_steps for k = 0..t_steps, snapped to multiples of dt.
    std::vector<double> time_grid() const;

    bool operator==(const RunConfig&) const = default;
};

/// Strict JSON parse: unknown keys and wrong types are rejected with the line
/// of the offending key in the message.
RunConfig parse_config(std::string_view json_text);

/// Canonical JSON form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

}  // namespace collapse_kaon
