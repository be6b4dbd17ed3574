#include "pba_app/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

#include "pba/error.hpp"
#include "pba_app/export.hpp"

namespace pba::app {

namespace {

using json = nlohmann::json;

json pair(const Interval& iv) { return json::array({iv.lo, iv.hi}); }

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

std::string file_safe(const std::string& name) {
  std::string s = name;
  for (char& c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) c = '_';
  }
  return s;
}

PropagationOptions prop_options(const AnalysisConfig& c, int threads) {
  PropagationOptions o;
  o.n = c.n;
  o.budget = c.budget;
  o.tol = c.tol;
  o.threads = threads;
  o.max_hyperrectangles = c.max_hyperrectangles;
  o.allow_over_cap = c.allow_over_cap;
  return o;
}

// Chooses the pipeline that matches which parameter kinds are present.
PropagationResult run_any(const AnalysisConfig& c, const ParameterSet& ps,
                          std::uint64_t seed, int threads) {
  if (ps.precise.empty()) {
    return propagate_pboxes(c.model, ps, prop_options(c, threads));
  }
  if (ps.boxed.empty()) {
    return psa_propagate(c.model, ps, c.samples, seed, threads);
  }
  return propagate_mixed(c.model, ps, c.samples, seed, prop_options(c, threads));
}

json outcome_json(const PropagationResult& r) {
  json o;
  o["support"] = pair(r.pbox.support());
  o["expected"] = pair(expected_interval(r.pbox));
  o["hyperrectangles"] = r.boxes;
  o["unconverged"] = r.unconverged;
  o["evaluations"] = r.evaluations;
  return o;
}

}  // namespace

RunReport run_analysis(const AnalysisConfig& c, const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t seed = opt.seed.value_or(c.seed);
  const int threads = opt.threads.value_or(c.threads);
  std::error_code ec;
  std::filesystem::create_directories(opt.out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot create " + opt.out_dir.string() + ": " + ec.message());
  }

  json s;
  s["schema"] = kSummarySchema;
  s["name"] = c.name;
  s["model"] = c.model_name;
  s["pipeline"] = std::string(to_string(c.pipeline));
  s["seed"] = seed;
  s["n"] = c.n;
  s["samples"] = c.samples;
  s["optimizer"] = {{"budget", c.budget}, {"tol", c.tol}};

  switch (c.pipeline) {
    case Pipeline::kPboxCurve: {
      const MinimalData& d = c.params.boxed.at(c.curve_parameter);
      const PBox p = build_pbox(d);
      export_curve(p, c.grid, opt.out_dir / "curve.csv");
      s["pbox"] = {{"parameter", c.curve_parameter},
                   {"kind", std::string(to_string(kind_of(d)))},
                   {"support", pair(p.support())},
                   {"curve", "curve.csv"}};
      break;
    }
    case Pipeline::kPropagate:
    case Pipeline::kPropagateMixed:
    case Pipeline::kPsa: {
      PropagationResult r =
          c.pipeline == Pipeline::kPropagate
              ? propagate_pboxes(c.model, c.params, prop_options(c, threads))
          : c.pipeline == Pipeline::kPsa
              ? psa_propagate(c.model, c.params, c.samples, seed, threads)
              : propagate_mixed(c.model, c.params, c.samples, seed,
                                prop_options(c, threads));
      json o = outcome_json(r);
      o["curve"] = "curve.csv";
      Interval span = r.pbox.support();
      std::optional<PropagationResult> base;
      if (c.baseline) {
        const ParameterSet ps = merge_parameters(c.params, c.baseline->overrides);
        base = psa_propagate(c.model, ps, c.baseline->samples, seed, threads);
        span = hull(span, base->pbox.support());
      }
      const std::vector<double> grid = curve_grid(span, c.grid);
      write_curve(curve_rows(r.pbox, grid), opt.out_dir / "curve.csv");
      s["outcome"] = o;
      if (base) {
        write_curve(curve_rows(base->pbox, grid), opt.out_dir / "baseline.csv");
        // Largest distance of the baseline CDF outside the envelope, checked
        // at and just below every sample point.
        double excess = 0.0;
        for (const Extremum& x : base->pbox.extrema()) {
          for (double y : {x.y_min, std::nextafter(x.y_min, -INFINITY)}) {
            const double f = base->pbox.lower(y);
            excess = std::max(excess, r.pbox.lower(y) - f);
            excess = std::max(excess, f - r.pbox.upper(y));
          }
        }
        double mean = 0.0;
        for (const Extremum& x : base->pbox.extrema()) mean += x.mass * x.y_min;
        s["baseline"] = {{"samples", c.baseline->samples},
                         {"mean", mean},
                         {"range", pair(base->pbox.support())},
                         {"max_excess", excess},
                         {"curve", "baseline.csv"}};
      }
      break;
    }
    case Pipeline::kDecide: {
      std::vector<UtilityInterval> us;
      json acts = json::array();
      for (const Action& a : c.actions) {
        const ParameterSet ps = merge_parameters(c.params, a.overrides);
        PropagationResult r = run_any(c, ps, seed, threads);
        json o = outcome_json(r);
        o["name"] = a.name;
        const std::string file = "curve-" + file_safe(a.name) + ".csv";
        export_curve(r.pbox, c.grid, opt.out_dir / file);
        o["curve"] = file;
        acts.push_back(o);
        us.push_back({a.name, expected_interval(r.pbox)});
      }
      const Choice ch = choose(us, c.rule);
      static const char* kinds[] = {"dominance", "pessimist", "optimist",
                                    "hurwicz"};
      json rule = {{"kind", kinds[static_cast<int>(c.rule.kind)]}};
      if (c.rule.kind == DecisionRule::Kind::kHurwicz) rule["alpha"] = c.rule.alpha;
      s["actions"] = acts;
      s["rule"] = rule;
      s["choice"] = {{"indeterminate", ch.indeterminate},
                     {"actions", ch.actions}};
      break;
    }
  }
  write_json(s, opt.out_dir / "summary.json");
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  write_json({{"schema", "pba-timing/1"}, {"seconds", secs}},
             opt.out_dir / "timing.json");
  return {s, secs};
}

json error_record(const std::exception& e) {
  json err;
  if (const auto* pe = dynamic_cast<const Error*>(&e)) {
    err["code"] = std::string(to_string(pe->code()));
    if (!pe->point().empty()) err["point"] = pe->point();
  } else {
    err["code"] = "InternalError";
  }
  err["message"] = e.what();
  return {{"error", err}};
}

}  // namespace pba::app
