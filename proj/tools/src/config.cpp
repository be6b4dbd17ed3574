#include "pba_app/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "pba/error.hpp"

namespace pba::app {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw Error(ErrorCode::kConfigParseError,
              (where.empty() ? std::string("/") : where) + ": " + msg);
}

std::string child(const std::string& where, const std::string& key) {
  std::string k;
  for (char c : key) {
    if (c == '~') {
      k += "~0";
    } else if (c == '/') {
      k += "~1";
    } else {
      k += c;
    }
  }
  return where + "/" + k;
}

void only_keys(const json& j, const std::string& where,
               std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) fail(child(where, k), "unknown key");
  }
}

double num(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

std::optional<double> opt_num(const json& j, const char* key,
                              const std::string& where) {
  if (!j.contains(key)) return std::nullopt;
  return num(j.at(key), child(where, key));
}

double req_num(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail(child(where, key), "required");
  return num(j.at(key), child(where, key));
}

int req_int(const json& j, const std::string& where, int min_value) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  const auto v = j.get<long long>();
  if (v < min_value || v > std::numeric_limits<int>::max()) {
    fail(where, "must be >= " + std::to_string(min_value));
  }
  return static_cast<int>(v);
}

std::string str(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

std::vector<double> num_array(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(num(j[i], where + "/" + std::to_string(i)));
  }
  return out;
}

// Rethrows library validation errors with the config location attached.
template <class F>
auto located(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigParseError) throw;
    fail(where, e.what());
  }
}

MinimalData parse_pbox(const json& j, const std::string& where) {
  only_keys(j, where, {"min", "max", "median", "mean", "sd"});
  const double a = req_num(j, "min", where);
  const double b = req_num(j, "max", where);
  const auto m = opt_num(j, "median", where);
  const auto mu = opt_num(j, "mean", where);
  const auto sd = opt_num(j, "sd", where);
  return located(where, [&] {
    return validate_minimal_data(make_minimal_data(a, b, m, mu, sd));
  });
}

DistributionSpec parse_distribution(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("family")) {
    fail(where, "distribution needs a family");
  }
  const std::string fam = str(j.at("family"), child(where, "family"));
  DistributionSpec d;
  if (fam == "gamma") {
    only_keys(j, where, {"family", "mean", "sd", "shape", "rate"});
    if (j.contains("shape") || j.contains("rate")) {
      d = GammaDist{req_num(j, "shape", where), req_num(j, "rate", where)};
    } else {
      Statistics s;
      s.mean = req_num(j, "mean", where);
      s.sd = req_num(j, "sd", where);
      d = located(where, [&] { return moment_match(Family::kGamma, s); });
    }
  } else if (fam == "beta") {
    only_keys(j, where, {"family", "mean", "sd", "alpha", "beta"});
    if (j.contains("alpha") || j.contains("beta")) {
      d = BetaDist{req_num(j, "alpha", where), req_num(j, "beta", where)};
    } else {
      Statistics s;
      s.mean = req_num(j, "mean", where);
      s.sd = req_num(j, "sd", where);
      d = located(where, [&] { return moment_match(Family::kBeta, s); });
    }
  } else if (fam == "uniform") {
    only_keys(j, where, {"family", "min", "max"});
    Statistics s;
    s.a = req_num(j, "min", where);
    s.b = req_num(j, "max", where);
    d = located(where, [&] { return moment_match(Family::kUniform, s); });
  } else if (fam == "tabulated") {
    only_keys(j, where, {"family", "x", "cdf"});
    if (!j.contains("x") || !j.contains("cdf")) fail(where, "needs x and cdf");
    d = TabulatedDist{num_array(j.at("x"), child(where, "x")),
                      num_array(j.at("cdf"), child(where, "cdf"))};
  } else {
    fail(child(where, "family"), "unknown family '" + fam + "'");
  }
  located(where, [&] {
    validate_distribution(d);
    return 0;
  });
  return d;
}

// Adds one parameter assignment, replacing any earlier one of that name.
void parse_parameter(const std::string& name, const json& j,
                     const std::string& where, ParameterSet& ps) {
  ps.fixed.erase(name);
  ps.precise.erase(name);
  ps.boxed.erase(name);
  if (j.is_number()) {
    ps.fixed[name] = j.get<double>();
    return;
  }
  if (!j.is_object() || j.size() != 1) {
    fail(where, "expected a number or one of fixed / pbox / distribution");
  }
  const std::string kind = j.begin().key();
  const json& body = j.begin().value();
  const std::string w = child(where, kind);
  if (kind == "fixed") {
    ps.fixed[name] = num(body, w);
  } else if (kind == "pbox") {
    ps.boxed[name] = parse_pbox(body, w);
  } else if (kind == "distribution") {
    ps.precise[name] = parse_distribution(body, w);
  } else {
    fail(w, "unknown parameter kind");
  }
}

ParameterSet parse_parameters(const json& j, const std::string& where,
                              const Model& model, ParameterSet ps = {}) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [name, body] : j.items()) {
    const std::string w = child(where, name);
    if (std::find(model.inputs.begin(), model.inputs.end(), name) ==
        model.inputs.end()) {
      fail(w, "unknown parameter '" + name + "' for this model");
    }
    parse_parameter(name, body, w, ps);
  }
  return ps;
}

void check_complete(const ParameterSet& ps, const Model& model,
                    const std::string& where) {
  for (const std::string& in : model.inputs) {
    if (!ps.fixed.count(in) && !ps.precise.count(in) && !ps.boxed.count(in)) {
      fail(where, "model input '" + in + "' is not assigned");
    }
  }
}

Quantity parse_quantity(const json& j, const std::string& where) {
  if (j.is_number()) return Quantity::constant(j.get<double>());
  if (j.is_string()) return Quantity::param(j.get<std::string>());
  if (j.is_array()) {
    Quantity q;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string w = where + "/" + std::to_string(i);
      if (j[i].is_number()) {
        q.factor *= j[i].get<double>();
      } else if (j[i].is_string()) {
        q.names.push_back(j[i].get<std::string>());
      } else {
        fail(w, "expected a number or parameter name");
      }
    }
    return q;
  }
  fail(where, "expected a number, a parameter name, or a product array");
}

CohortCeaSpec parse_cohort(const json& j, const std::string& where) {
  only_keys(j, where,
            {"states", "transitions", "cycle_years", "horizon",
             "discount_rate", "initial"});
  CohortCeaSpec s;
  if (!j.contains("states") || !j.at("states").is_array()) {
    fail(child(where, "states"), "expected an array of states");
  }
  const json& states = j.at("states");
  for (std::size_t i = 0; i < states.size(); ++i) {
    const std::string w = child(where, "states") + "/" + std::to_string(i);
    only_keys(states[i], w, {"name", "absorbing", "cost", "utility"});
    if (!states[i].contains("name")) fail(w, "state needs a name");
    s.states.push_back(str(states[i].at("name"), child(w, "name")));
    const bool absorbing = states[i].value("absorbing", false);
    s.absorbing.push_back(absorbing);
    s.cost.push_back(states[i].contains("cost")
                         ? parse_quantity(states[i].at("cost"), child(w, "cost"))
                         : Quantity::constant(0.0));
    s.utility.push_back(
        states[i].contains("utility")
            ? parse_quantity(states[i].at("utility"), child(w, "utility"))
            : Quantity::constant(0.0));
  }
  const std::size_t n = s.states.size();
  auto index_of = [&](const std::string& name, const std::string& w) {
    auto it = std::find(s.states.begin(), s.states.end(), name);
    if (it == s.states.end()) fail(w, "unknown state '" + name + "'");
    return static_cast<std::size_t>(it - s.states.begin());
  };
  s.transitions.assign(n, std::vector<TransitionEntry>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (s.absorbing[i]) s.transitions[i][i].q = Quantity::constant(1.0);
  }
  const std::string tw = child(where, "transitions");
  if (j.contains("transitions")) {
    const json& t = j.at("transitions");
    if (!t.is_object()) fail(tw, "expected an object keyed by state");
    for (const auto& [from, row] : t.items()) {
      const std::string rw = child(tw, from);
      const std::size_t fi = index_of(from, rw);
      if (!row.is_object()) fail(rw, "expected an object keyed by state");
      for (const auto& [to, q] : row.items()) {
        const std::string qw = child(rw, to);
        const std::size_t ti = index_of(to, qw);
        if (q.is_string() && q.get<std::string>() == "rest") {
          s.transitions[fi][ti] = TransitionEntry{Quantity::constant(0.0), true};
        } else {
          s.transitions[fi][ti] = TransitionEntry{parse_quantity(q, qw)};
        }
      }
    }
  }
  s.cycle_years = j.contains("cycle_years")
                      ? num(j.at("cycle_years"), child(where, "cycle_years"))
                      : 1.0;
  s.horizon = j.contains("horizon")
                  ? req_int(j.at("horizon"), child(where, "horizon"), 1)
                  : 1;
  s.discount_rate =
      j.contains("discount_rate")
          ? num(j.at("discount_rate"), child(where, "discount_rate"))
          : 0.0;
  s.initial.assign(n, 0.0);
  if (!j.contains("initial") || !j.at("initial").is_object()) {
    fail(child(where, "initial"), "expected an object keyed by state");
  }
  for (const auto& [st, v] : j.at("initial").items()) {
    const std::string w = child(child(where, "initial"), st);
    s.initial[index_of(st, w)] = num(v, w);
  }
  located(where, [&] {
    validate_spec(s);
    return 0;
  });
  return s;
}

Model parse_inline_model(const json& j, const std::string& where) {
  only_keys(j, where, {"cohort"});
  if (!j.contains("cohort")) fail(where, "inline model needs 'cohort'");
  const std::string w = child(where, "cohort");
  const json& c = j.at("cohort");
  only_keys(c, w, {"intervention", "comparator", "wtp", "outcome"});
  if (!c.contains("intervention") || !c.contains("comparator")) {
    fail(w, "needs intervention and comparator specs");
  }
  CeaComparison cmp;
  cmp.intervention = parse_cohort(c.at("intervention"), child(w, "intervention"));
  cmp.comparator = parse_cohort(c.at("comparator"), child(w, "comparator"));
  cmp.wtp = c.contains("wtp") ? num(c.at("wtp"), child(w, "wtp")) : 30000.0;
  if (!(cmp.wtp >= 0.0)) fail(child(w, "wtp"), "must be >= 0");
  CeaOutcome outcome = CeaOutcome::kInmb;
  if (c.contains("outcome")) {
    const std::string o = str(c.at("outcome"), child(w, "outcome"));
    if (o == "inmb") {
      outcome = CeaOutcome::kInmb;
    } else if (o == "arm-nmb") {
      outcome = CeaOutcome::kArmNmb;
    } else {
      fail(child(w, "outcome"), "expected 'inmb' or 'arm-nmb'");
    }
  }
  return located(w, [&] { return cea_model(cmp, outcome); });
}

Pipeline parse_pipeline(const json& j, const std::string& where) {
  const std::string s = str(j, where);
  if (s == "pbox-curve") return Pipeline::kPboxCurve;
  if (s == "propagate") return Pipeline::kPropagate;
  if (s == "propagate-mixed") return Pipeline::kPropagateMixed;
  if (s == "psa") return Pipeline::kPsa;
  if (s == "decide") return Pipeline::kDecide;
  fail(where, "unknown pipeline '" + s + "'");
}

DecisionRule parse_rule(const json& j, const std::string& where) {
  only_keys(j, where, {"kind", "alpha"});
  if (!j.contains("kind")) fail(child(where, "kind"), "required");
  const std::string k = str(j.at("kind"), child(where, "kind"));
  if (k == "dominance") return DecisionRule::dominance();
  if (k == "pessimist") return DecisionRule::pessimist();
  if (k == "optimist") return DecisionRule::optimist();
  if (k == "hurwicz") {
    const double a = req_num(j, "alpha", where);
    if (!(a >= 0.0 && a <= 1.0)) fail(child(where, "alpha"), "must be in [0, 1]");
    return DecisionRule::hurwicz(a);
  }
  fail(child(where, "kind"), "unknown rule '" + k + "'");
}

}  // namespace

std::string_view to_string(Pipeline p) {
  switch (p) {
    case Pipeline::kPboxCurve: return "pbox-curve";
    case Pipeline::kPropagate: return "propagate";
    case Pipeline::kPropagateMixed: return "propagate-mixed";
    case Pipeline::kPsa: return "psa";
    case Pipeline::kDecide: return "decide";
  }
  return "unknown";
}

ParameterSet merge_parameters(const ParameterSet& base,
                              const ParameterSet& over) {
  ParameterSet out = base;
  auto drop = [&](const std::string& name) {
    out.fixed.erase(name);
    out.precise.erase(name);
    out.boxed.erase(name);
  };
  for (const auto& [k, v] : over.fixed) {
    drop(k);
    out.fixed[k] = v;
  }
  for (const auto& [k, v] : over.precise) {
    drop(k);
    out.precise[k] = v;
  }
  for (const auto& [k, v] : over.boxed) {
    drop(k);
    out.boxed[k] = v;
  }
  return out;
}

MinimalData make_minimal_data(double min, double max,
                              std::optional<double> median,
                              std::optional<double> mean,
                              std::optional<double> sd) {
  if (sd && !mean) {
    throw Error(ErrorCode::kInvalidArgument, "sd requires mean");
  }
  if (sd && median) {
    throw Error(ErrorCode::kInvalidArgument,
                "median, mean and sd together have no single constructor");
  }
  if (median && mean) return MinMaxMedianMean{min, max, *median, *mean};
  if (sd) return MinMaxMeanStd{min, max, *mean, *sd};
  if (mean) return MinMaxMean{min, max, *mean};
  if (median) return MinMaxMedian{min, max, *median};
  return MinMax{min, max};
}

AnalysisConfig parse_config(const std::string& text,
                            const ModelRegistry& registry) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfigParseError,
                "byte " + std::to_string(e.byte) + ": " + e.what());
  }
  only_keys(j, "",
            {"schema", "name", "model", "pipeline", "parameters", "n",
             "samples", "seed", "optimizer", "threads", "max_hyperrectangles",
             "allow_over_cap", "grid", "curve_parameter", "actions", "rule",
             "baseline"});
  if (!j.contains("schema") || str(j.at("schema"), "/schema") != kConfigSchema) {
    fail("/schema", std::string("expected \"") + kConfigSchema + "\"");
  }
  AnalysisConfig c;
  c.name = j.contains("name") ? str(j.at("name"), "/name") : "analysis";
  if (!j.contains("model")) fail("/model", "required");
  if (j.at("model").is_string()) {
    c.model_name = j.at("model").get<std::string>();
    if (!registry.contains(c.model_name)) {
      fail("/model", "unknown model '" + c.model_name + "'");
    }
    c.model = registry.get(c.model_name);
  } else {
    c.model_name = "inline";
    c.model = parse_inline_model(j.at("model"), "/model");
  }
  if (!j.contains("pipeline")) fail("/pipeline", "required");
  c.pipeline = parse_pipeline(j.at("pipeline"), "/pipeline");
  if (!j.contains("parameters")) fail("/parameters", "required");
  c.params = parse_parameters(j.at("parameters"), "/parameters", c.model);

  if (j.contains("n")) c.n = req_int(j.at("n"), "/n", 1);
  if (j.contains("samples")) c.samples = req_int(j.at("samples"), "/samples", 1);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) {
      fail("/seed", "expected a non-negative integer");
    }
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    only_keys(o, "/optimizer", {"budget", "tol"});
    if (o.contains("budget")) c.budget = req_int(o.at("budget"), "/optimizer/budget", 1);
    if (o.contains("tol")) {
      c.tol = num(o.at("tol"), "/optimizer/tol");
      if (!(c.tol > 0.0)) fail("/optimizer/tol", "must be positive");
    }
  }
  if (j.contains("threads")) c.threads = req_int(j.at("threads"), "/threads", 0);
  if (j.contains("max_hyperrectangles")) {
    c.max_hyperrectangles = static_cast<std::size_t>(
        req_int(j.at("max_hyperrectangles"), "/max_hyperrectangles", 1));
  }
  if (j.contains("allow_over_cap")) {
    if (!j.at("allow_over_cap").is_boolean()) {
      fail("/allow_over_cap", "expected a boolean");
    }
    c.allow_over_cap = j.at("allow_over_cap").get<bool>();
  }
  if (j.contains("grid")) c.grid = req_int(j.at("grid"), "/grid", 2);
  if (j.contains("rule")) c.rule = parse_rule(j.at("rule"), "/rule");

  if (j.contains("actions")) {
    const json& acts = j.at("actions");
    if (!acts.is_array()) fail("/actions", "expected an array");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < acts.size(); ++i) {
      const std::string w = "/actions/" + std::to_string(i);
      only_keys(acts[i], w, {"name", "parameters"});
      Action a;
      if (!acts[i].contains("name")) fail(child(w, "name"), "required");
      a.name = str(acts[i].at("name"), child(w, "name"));
      if (!seen.insert(a.name).second) fail(child(w, "name"), "duplicate action");
      if (acts[i].contains("parameters")) {
        a.overrides = parse_parameters(acts[i].at("parameters"),
                                       child(w, "parameters"), c.model);
      }
      c.actions.push_back(std::move(a));
    }
  }
  if (j.contains("baseline")) {
    const json& b = j.at("baseline");
    only_keys(b, "/baseline", {"parameters", "samples"});
    Baseline base;
    if (b.contains("parameters")) {
      base.overrides = parse_parameters(b.at("parameters"),
                                        "/baseline/parameters", c.model);
    }
    if (b.contains("samples")) {
      base.samples = req_int(b.at("samples"), "/baseline/samples", 1);
    }
    c.baseline = std::move(base);
  }

  switch (c.pipeline) {
    case Pipeline::kPboxCurve: {
      if (!j.contains("curve_parameter")) fail("/curve_parameter", "required");
      c.curve_parameter = str(j.at("curve_parameter"), "/curve_parameter");
      if (!c.params.boxed.count(c.curve_parameter)) {
        fail("/curve_parameter", "must name a pbox parameter");
      }
      break;
    }
    case Pipeline::kPropagate:
      if (!c.params.precise.empty()) {
        fail("/parameters",
             "propagate takes no distribution parameters; use "
             "propagate-mixed");
      }
      break;
    case Pipeline::kPsa:
      if (!c.params.boxed.empty()) {
        fail("/parameters", "psa takes no pbox parameters");
      }
      break;
    case Pipeline::kDecide:
      if (c.actions.size() < 2) fail("/actions", "decide needs >= 2 actions");
      break;
    case Pipeline::kPropagateMixed:
      break;
  }
  if (c.pipeline == Pipeline::kDecide) {
    for (std::size_t i = 0; i < c.actions.size(); ++i) {
      check_complete(merge_parameters(c.params, c.actions[i].overrides),
                     c.model, "/actions/" + std::to_string(i));
    }
  } else if (c.pipeline != Pipeline::kPboxCurve) {
    check_complete(c.params, c.model, "/parameters");
  }
  return c;
}

AnalysisConfig load_config(const std::filesystem::path& path,
                           const ModelRegistry& registry) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), registry);
}

}  // namespace pba::app
