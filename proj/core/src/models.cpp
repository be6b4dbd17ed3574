#include "pba/models.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "pba/error.hpp"

namespace pba {

namespace {

constexpr double kRowTol = 1e-10;

std::string where(int cycle, const std::string& state) {
  return "cycle " + std::to_string(cycle) + ", state " + state;
}

}  // namespace

// ---- registry ------------------------------------------------------------

void ModelRegistry::add(const std::string& name, Model model) {
  if (models_.count(name)) {
    throw Error(ErrorCode::kInvalidModelSpec,
                "model '" + name + "' registered twice");
  }
  models_.emplace(name, std::move(model));
}

bool ModelRegistry::contains(const std::string& name) const {
  return models_.count(name) > 0;
}

const Model& ModelRegistry::get(const std::string& name) const {
  auto it = models_.find(name);
  if (it == models_.end()) {
    throw Error(ErrorCode::kInvalidModelSpec, "unknown model '" + name + "'");
  }
  return it->second;
}

std::vector<std::string> ModelRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& kv : models_) out.push_back(kv.first);
  return out;
}

ModelRegistry ModelRegistry::builtin() {
  ModelRegistry r;
  r.add("life-expectancy", life_expectancy_model());
  r.add("demo-cea-inmb", cea_model(demo_cea(), CeaOutcome::kInmb));
  r.add("demo-cea-nmb", cea_model(demo_cea(), CeaOutcome::kArmNmb));
  return r;
}

// ---- four-state chain ----------------------------------------------------

double life_expectancy(const FourStateRates& r) {
  const double c[6] = {r.c1, r.c2, r.c3, r.c4, r.c5, r.c6};
  for (double x : c) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "rates must be finite and non-negative",
                  {r.c1, r.c2, r.c3, r.c4, r.c5, r.c6});
    }
  }
  // Negated transient generator over S1..S3.
  Eigen::Matrix3d m;
  m << r.c1 + r.c2 + r.c3, -r.c1, -r.c2,  //
      0.0, r.c4 + r.c5, -r.c4,            //
      0.0, 0.0, r.c6;
  bool reach[3] = {true, r.c1 > 0.0, false};
  reach[2] = r.c2 > 0.0 || (reach[1] && r.c4 > 0.0);
  Eigen::Vector3d rhs = Eigen::Vector3d::Ones();
  for (int i = 0; i < 3; ++i) {
    if (!reach[i]) {
      m.row(i).setZero();
      m.col(i).setZero();
      m(i, i) = 1.0;
      rhs(i) = 0.0;
    } else if (m(i, i) == 0.0) {
      throw Error(ErrorCode::kSingularSystem,
                  "state S" + std::to_string(i + 1) +
                      " is reachable but has no exit",
                  {r.c1, r.c2, r.c3, r.c4, r.c5, r.c6});
    }
  }
  const Eigen::Vector3d t = m.triangularView<Eigen::Upper>().solve(rhs);
  return t(0);
}

Model life_expectancy_model() {
  Model m;
  m.inputs = {"c1", "c2", "c3", "c4", "c5", "c6"};
  m.fn = [](std::span<const double> x) {
    return life_expectancy({x[0], x[1], x[2], x[3], x[4], x[5]});
  };
  return m;
}

// ---- cohort CEA ----------------------------------------------------------

double Quantity::eval(const ParamMap& params) const {
  double v = factor;
  for (const std::string& n : names) {
    auto it = params.find(n);
    if (it == params.end()) {
      throw Error(ErrorCode::kInvalidModelSpec,
                  "parameter '" + n + "' has no value");
    }
    v *= it->second;
  }
  return v;
}

void validate_spec(const CohortCeaSpec& spec) {
  const std::size_t n = spec.states.size();
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kInvalidModelSpec, msg);
  };
  if (n == 0) fail("cohort model has no states");
  if (spec.absorbing.size() != n || spec.transitions.size() != n ||
      spec.cost.size() != n || spec.utility.size() != n ||
      spec.initial.size() != n) {
    fail("per-state arrays must all have one entry per state");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.transitions[i].size() != n) {
      fail("transition row for " + spec.states[i] + " has wrong length");
    }
    int complements = 0;
    for (const TransitionEntry& e : spec.transitions[i]) {
      complements += e.complement ? 1 : 0;
    }
    if (complements > 1) {
      fail("transition row for " + spec.states[i] +
           " has more than one complement entry");
    }
  }
  if (!(spec.cycle_years > 0.0) || !std::isfinite(spec.cycle_years)) {
    fail("cycle length must be positive");
  }
  if (spec.horizon < 1) fail("horizon must be >= 1 cycle");
  if (!(spec.discount_rate > -1.0) || !std::isfinite(spec.discount_rate)) {
    fail("discount rate must be > -1");
  }
  double total = 0.0;
  for (double p : spec.initial) {
    if (!(p >= 0.0)) fail("initial distribution must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > kRowTol) fail("initial distribution must sum to 1");
}

std::vector<std::string> referenced_parameters(const CohortCeaSpec& spec) {
  std::set<std::string> names;
  auto take = [&](const Quantity& q) {
    for (const auto& n : q.names) names.insert(n);
  };
  for (const auto& row : spec.transitions) {
    for (const auto& e : row) {
      if (!e.complement) take(e.q);
    }
  }
  for (const auto& q : spec.cost) take(q);
  for (const auto& q : spec.utility) take(q);
  return {names.begin(), names.end()};
}

Eigen::MatrixXd transition_matrix(const CohortCeaSpec& spec,
                                  const ParamMap& params) {
  validate_spec(spec);
  const int n = static_cast<int>(spec.states.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    int comp = -1;
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const TransitionEntry& e = spec.transitions[i][j];
      if (e.complement) {
        comp = j;
        continue;
      }
      const double v = e.q.eval(params);
      if (!(v >= -kRowTol && v <= 1.0 + kRowTol)) {
        throw Error(ErrorCode::kRowSumViolation,
                    "transition probability " + std::to_string(v) +
                        " outside [0, 1] at " + where(0, spec.states[i]));
      }
      p(i, j) = v;
      sum += v;
    }
    if (comp >= 0) {
      const double rest = 1.0 - sum;
      if (rest < -kRowTol) {
        throw Error(ErrorCode::kRowSumViolation,
                    "row sums to " + std::to_string(sum) + " before the " +
                        "complement at " + where(0, spec.states[i]));
      }
      p(i, comp) = std::max(rest, 0.0);
    }
    const double row = p.row(i).sum();
    if (std::abs(row - 1.0) > kRowTol) {
      throw Error(ErrorCode::kRowSumViolation,
                  "row sums to " + std::to_string(row) + " at " +
                      where(0, spec.states[i]));
    }
    if (spec.absorbing[i] && p(i, i) != 1.0) {
      throw Error(ErrorCode::kInvalidModelSpec,
                  "absorbing state " + spec.states[i] + " must stay put");
    }
  }
  return p;
}

Eigen::MatrixXd cohort_trace(const CohortCeaSpec& spec,
                             const ParamMap& params) {
  const Eigen::MatrixXd p = transition_matrix(spec, params);
  const int n = static_cast<int>(spec.states.size());
  Eigen::MatrixXd trace(spec.horizon, n);
  trace.row(0) = Eigen::Map<const Eigen::RowVectorXd>(spec.initial.data(), n);
  for (int t = 0; t + 1 < spec.horizon; ++t) {
    trace.row(t + 1) = trace.row(t) * p;
    const double mass = trace.row(t + 1).sum();
    if (std::abs(mass - 1.0) > kRowTol) {
      Eigen::Index worst = 0;
      (trace.row(t + 1) - trace.row(t)).cwiseAbs().maxCoeff(&worst);
      throw Error(ErrorCode::kRowSumViolation,
                  "cohort mass " + std::to_string(mass) + " at " +
                      where(t + 1, spec.states[static_cast<std::size_t>(worst)]));
    }
  }
  return trace;
}

CeaTotals discounted_outcomes(const Eigen::MatrixXd& trace,
                              const CohortCeaSpec& spec,
                              const ParamMap& params) {
  const Eigen::Index n = trace.cols();
  Eigen::VectorXd cost(n), util(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    cost(i) = spec.cost[static_cast<std::size_t>(i)].eval(params);
    util(i) = spec.utility[static_cast<std::size_t>(i)].eval(params);
    if (!(util(i) >= 0.0 && util(i) <= 1.0)) {
      throw Error(ErrorCode::kInvalidModelSpec,
                  "utility of " + spec.states[static_cast<std::size_t>(i)] +
                      " outside [0, 1]");
    }
  }
  CeaTotals out;
  const double base = 1.0 + spec.discount_rate;
  for (Eigen::Index t = 0; t < trace.rows(); ++t) {
    const double df =
        std::pow(base, -static_cast<double>(t) * spec.cycle_years);
    out.cost += df * trace.row(t).dot(cost);
    out.qaly += df * trace.row(t).dot(util) * spec.cycle_years;
  }
  return out;
}

double inmb(double cost_a, double qaly_a, double cost_b, double qaly_b,
            double wtp) {
  return wtp * (qaly_a - qaly_b) - (cost_a - cost_b);
}

Model cea_model(const CeaComparison& cmp, CeaOutcome outcome) {
  validate_spec(cmp.intervention);
  validate_spec(cmp.comparator);
  std::set<std::string> names;
  for (const auto& n : referenced_parameters(cmp.intervention)) names.insert(n);
  for (const auto& n : referenced_parameters(cmp.comparator)) names.insert(n);
  if (outcome == CeaOutcome::kArmNmb) {
    if (names.count("arm")) {
      throw Error(ErrorCode::kInvalidModelSpec,
                  "'arm' is reserved for the arm selector");
    }
    names.insert("arm");
  }
  Model m;
  m.inputs.assign(names.begin(), names.end());
  const std::vector<std::string> inputs = m.inputs;
  m.fn = [cmp, outcome, inputs](std::span<const double> x) {
    ParamMap params;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      params.emplace(inputs[i], x[i]);
    }
    auto run = [&](const CohortCeaSpec& s) {
      return discounted_outcomes(cohort_trace(s, params), s, params);
    };
    if (outcome == CeaOutcome::kInmb) {
      const CeaTotals a = run(cmp.intervention);
      const CeaTotals b = run(cmp.comparator);
      return inmb(a.cost, a.qaly, b.cost, b.qaly, cmp.wtp);
    }
    const bool use_a = params.at("arm") >= 0.5;
    const CeaTotals t = run(use_a ? cmp.intervention : cmp.comparator);
    return cmp.wtp * t.qaly - t.cost;
  };
  return m;
}

namespace {

CohortCeaSpec demo_arm(bool intervention) {
  enum { kOp, kWell, kComp, kRev, kDead };
  CohortCeaSpec s;
  s.states = {"Operation", "Healthy", "Complication", "Revision", "Dead"};
  s.absorbing = {false, false, false, false, true};
  const auto P = [](std::string n) { return TransitionEntry{Quantity::param(n)}; };
  const TransitionEntry rest{Quantity::constant(0.0), true};
  const TransitionEntry none{};
  s.transitions.assign(5, std::vector<TransitionEntry>(5, none));
  auto& t = s.transitions;
  t[kOp][kWell] = rest;
  t[kOp][kDead] = P("p_surgery_death");
  t[kWell][kWell] = rest;
  t[kWell][kComp] = intervention
                        ? TransitionEntry{Quantity{1.0, {"rr_comp", "p_comp"}}}
                        : P("p_comp");
  t[kWell][kDead] = P("p_death");
  t[kComp][kComp] = rest;
  t[kComp][kWell] = P("p_recover");
  t[kComp][kRev] = P("p_revision");
  t[kComp][kDead] = P("p_death");
  t[kRev][kWell] = rest;
  t[kRev][kDead] = P("p_surgery_death");
  t[kDead][kDead] = TransitionEntry{Quantity::constant(1.0)};
  s.cost = {Quantity::param(intervention ? "cost_op_new" : "cost_op_std"),
            Quantity::param("cost_healthy"), Quantity::param("cost_comp"),
            Quantity::param("cost_revision"), Quantity::constant(0.0)};
  s.utility = {Quantity::param("u_op"), Quantity::param("u_healthy"),
               Quantity::param("u_comp"), Quantity::param("u_revision"),
               Quantity::constant(0.0)};
  s.cycle_years = 1.0 / 12.0;
  s.horizon = 120;
  s.discount_rate = 0.035;
  s.initial = {1.0, 0.0, 0.0, 0.0, 0.0};
  return s;
}

}  // namespace

CeaComparison demo_cea() {
  return {demo_arm(true), demo_arm(false), 30000.0};
}

ParamMap demo_cea_defaults() {
  return {
      {"p_comp", 0.004},        {"rr_comp", 0.6},
      {"p_recover", 0.3},       {"p_revision", 0.05},
      {"p_death", 0.0015},      {"p_surgery_death", 0.005},
      {"cost_op_new", 7500.0},  {"cost_op_std", 6000.0},
      {"cost_healthy", 25.0},   {"cost_comp", 400.0},
      {"cost_revision", 9000.0}, {"u_op", 0.6},
      {"u_healthy", 0.85},      {"u_comp", 0.55},
      {"u_revision", 0.5},
  };
}

}  // namespace pba
