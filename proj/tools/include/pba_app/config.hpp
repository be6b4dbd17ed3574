#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pba/decision.hpp"
#include "pba/models.hpp"
#include "pba/propagation.hpp"

namespace pba::app {

inline constexpr const char* kConfigSchema = "pba-config/1";
inline constexpr const char* kSummarySchema = "pba-summary/1";

enum class Pipeline { kPboxCurve, kPropagate, kPropagateMixed, kPsa, kDecide };

std::string_view to_string(Pipeline p);

struct Action {
  std::string name;
  // Replaces or adds parameter assignments for this action only.
  ParameterSet overrides;
};

// Extra PSA run drawn on the same outcome grid for comparison with the
// propagated envelope.
struct Baseline {
  ParameterSet overrides;
  int samples = 500;
};

struct AnalysisConfig {
  std::string name;
  std::string model_name;  // registry key, or "inline" for a cohort spec
  Model model;
  Pipeline pipeline = Pipeline::kPropagate;
  ParameterSet params;
  int n = 50;
  int samples = 50;
  std::uint64_t seed = 1;
  int budget = 2000;
  double tol = 1e-6;
  int threads = 0;
  std::size_t max_hyperrectangles = kDefaultMaxHyperrectangles;
  bool allow_over_cap = false;
  int grid = 201;
  std::string curve_parameter;  // pbox-curve pipeline
  std::vector<Action> actions;
  DecisionRule rule = DecisionRule::dominance();
  std::optional<Baseline> baseline;
};

// Parses and validates a config document. Errors are
// pba::Error(kConfigParseError) whose message starts with a JSON-pointer
// location.
AnalysisConfig parse_config(const std::string& text,
                            const ModelRegistry& registry);
AnalysisConfig load_config(const std::filesystem::path& path,
                           const ModelRegistry& registry);

// base with every assignment in over replacing the one of the same name.
ParameterSet merge_parameters(const ParameterSet& base,
                              const ParameterSet& over);

// Builds minimal data from whichever statistics are given. Median, mean and
// sd together are not a single constructor and are rejected here.
MinimalData make_minimal_data(double min, double max,
                              std::optional<double> median,
                              std::optional<double> mean,
                              std::optional<double> sd);

}  // namespace pba::app
