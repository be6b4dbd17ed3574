#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace pba {

// Black-box model: named inputs in a fixed order, scalar outcome. Must be
// pure and safe to call concurrently.
struct Model {
  std::vector<std::string> inputs;
  std::function<double(std::span<const double>)> fn;
};

class ModelRegistry {
 public:
  void add(const std::string& name, Model model);
  bool contains(const std::string& name) const;
  const Model& get(const std::string& name) const;
  std::vector<std::string> names() const;

  // life-expectancy, demo-cea-inmb, demo-cea-nmb.
  static ModelRegistry builtin();

 private:
  std::map<std::string, Model> models_;
};

// ---- four-state continuous-time chain ----------------------------------

// Rates per year: c1 S1->S2, c2 S1->S3, c3 S1->S4, c4 S2->S3, c5 S2->S4,
// c6 S3->S4. S4 is absorbing.
struct FourStateRates {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double c5 = 0.0;
  double c6 = 0.0;
};

// Expected time spent in S1, S2, S3 starting from S1.
double life_expectancy(const FourStateRates& r);

Model life_expectancy_model();

// ---- discrete-time cohort cost-effectiveness ---------------------------

using ParamMap = std::map<std::string, double, std::less<>>;

// factor times the product of the named parameters.
struct Quantity {
  double factor = 1.0;
  std::vector<std::string> names;

  static Quantity constant(double v) { return {v, {}}; }
  static Quantity param(std::string name) { return {1.0, {std::move(name)}}; }
  double eval(const ParamMap& params) const;
};

struct TransitionEntry {
  Quantity q = Quantity::constant(0.0);
  // Takes whatever probability the rest of the row leaves.
  bool complement = false;
};

struct CohortCeaSpec {
  std::vector<std::string> states;
  std::vector<bool> absorbing;
  // transitions[from][to]
  std::vector<std::vector<TransitionEntry>> transitions;
  std::vector<Quantity> cost;     // money per cycle
  std::vector<Quantity> utility;  // QALY weight per year
  double cycle_years = 1.0;
  int horizon = 1;
  double discount_rate = 0.0;
  std::vector<double> initial;
};

// Throws InvalidModelSpec on structural problems.
void validate_spec(const CohortCeaSpec& spec);

// Parameter names referenced anywhere in the spec, sorted.
std::vector<std::string> referenced_parameters(const CohortCeaSpec& spec);

Eigen::MatrixXd transition_matrix(const CohortCeaSpec& spec,
                                  const ParamMap& params);

// horizon rows; row 0 is the initial distribution.
Eigen::MatrixXd cohort_trace(const CohortCeaSpec& spec,
                             const ParamMap& params);

struct CeaTotals {
  double cost = 0.0;
  double qaly = 0.0;
};

// Rewards at cycle starts, discounted by (1 + rate)^(-t * cycle_years).
CeaTotals discounted_outcomes(const Eigen::MatrixXd& trace,
                              const CohortCeaSpec& spec,
                              const ParamMap& params);

double inmb(double cost_a, double qaly_a, double cost_b, double qaly_b,
            double wtp);

// Intervention (a) against comparator (b).
struct CeaComparison {
  CohortCeaSpec intervention;
  CohortCeaSpec comparator;
  double wtp = 30000.0;
};

enum class CeaOutcome {
  kInmb,
  // Net monetary benefit of one arm; the "arm" input selects the
  // intervention when >= 0.5.
  kArmNmb,
};

Model cea_model(const CeaComparison& cmp, CeaOutcome outcome);

// Synthetic five-state joint-replacement style comparison: monthly cycles
// over ten years, 3.5% annual discount, 30000 per QALY.
CeaComparison demo_cea();

// Reference values for every parameter the demo comparison reads.
ParamMap demo_cea_defaults();

}  // namespace pba
