#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>

#include "pba_app/config.hpp"

namespace pba::app {

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the config seed
  std::optional<int> threads;
  std::filesystem::path out_dir = ".";
};

struct RunReport {
  nlohmann::json summary;
  double seconds = 0.0;
};

// Runs the configured pipeline and writes curve CSV(s), summary.json and
// timing.json into out_dir. summary.json depends only on the config and
// seed, never on timing or thread count.
RunReport run_analysis(const AnalysisConfig& config, const RunOptions& opt);

// {"error": {"code", "message", "point"?}}
nlohmann::json error_record(const std::exception& e);

// Entry point of the pba executable.
int cli_main(int argc, const char* const* argv);

}  // namespace pba::app
