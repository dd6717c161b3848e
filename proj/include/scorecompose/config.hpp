/**
 * Serialized run configuration: the scenario plus output preferences.
 * Parsing is strict — any unknown key is rejected and named.
 */

#ifndef SCORECOMPOSE_CONFIG_HPP
#define SCORECOMPOSE_CONFIG_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "scorecompose/scenario.hpp"

namespace scorecompose {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

enum class OutputFormat { SummaryJson, SamplesCsv, HistogramCsv, TrajectoriesCsv };

std::string_view format_name(OutputFormat format) noexcept;

struct RunConfig {
    ScenarioSpec scenario;
    std::string output_dir = "out";
    std::vector<OutputFormat> formats = {OutputFormat::SummaryJson, OutputFormat::SamplesCsv,
                                         OutputFormat::HistogramCsv};
};

/// The reference simulation as a RunConfig.
RunConfig appendix_run_config();

/// Parses a config document; throws ConfigError naming the offending key on
/// unknown fields, wrong types or out-of-range values.
RunConfig parse_run_config(const std::string& json_text);

/// Canonical serialization; parse followed by serialize is a fixed point.
std::string serialize_run_config(const RunConfig& config);

}  // namespace scorecompose

#endif
