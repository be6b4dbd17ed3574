#include "pba/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "parallel.hpp"
#include "pba/error.hpp"

namespace pba {

namespace {

constexpr double kMassTol = 1e-9;

// Cumulative mass of the sorted points at or below y; exactly 0 below the
// first and exactly 1 from the last.
double cumulative(const std::vector<double>& xs, const std::vector<double>& cum,
                  double y) {
  const auto it = std::upper_bound(xs.begin(), xs.end(), y);
  const std::size_t k = static_cast<std::size_t>(it - xs.begin());
  if (k == 0) return 0.0;
  if (k == xs.size()) return 1.0;
  return std::min(cum[k - 1], 1.0);
}

void sorted_with_cum(std::vector<std::pair<double, double>> pts,
                     std::vector<double>& xs, std::vector<double>& cum) {
  std::sort(pts.begin(), pts.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  xs.clear();
  cum.clear();
  double run = 0.0;
  for (const auto& [x, m] : pts) {
    run += m;
    xs.push_back(x);
    cum.push_back(run);
  }
}

enum class Role { kFixed, kPrecise, kBoxed };

struct Binding {
  std::vector<Role> role;
  std::vector<double> fixed_values;   // valid where role == kFixed
  std::vector<std::string> precise;   // names, model order
  std::vector<std::size_t> precise_pos;
  std::vector<std::size_t> boxed_pos;
  std::vector<DiscretizedPBox> boxed;
};

Binding bind(const Model& model, const ParameterSet& params,
             int n_slices) {
  Binding b;
  std::size_t used = 0;
  for (std::size_t i = 0; i < model.inputs.size(); ++i) {
    const std::string& name = model.inputs[i];
    const int hits = static_cast<int>(params.fixed.count(name)) +
                     static_cast<int>(params.precise.count(name)) +
                     static_cast<int>(params.boxed.count(name));
    if (hits == 0) {
      throw Error(ErrorCode::kInvalidParameterSet,
                  "model input '" + name + "' has no value");
    }
    if (hits > 1) {
      throw Error(ErrorCode::kInvalidParameterSet,
                  "parameter '" + name + "' is assigned more than once");
    }
    ++used;
    b.fixed_values.push_back(0.0);
    if (auto it = params.fixed.find(name); it != params.fixed.end()) {
      b.role.push_back(Role::kFixed);
      b.fixed_values.back() = it->second;
    } else if (params.precise.count(name)) {
      validate_distribution(params.precise.at(name));
      b.role.push_back(Role::kPrecise);
      b.precise.push_back(name);
      b.precise_pos.push_back(i);
    } else {
      b.role.push_back(Role::kBoxed);
      b.boxed_pos.push_back(i);
      if (n_slices > 0) {
        b.boxed.push_back(
            discretize_outer(build_pbox(params.boxed.at(name)), n_slices));
      }
    }
  }
  const std::size_t total =
      params.fixed.size() + params.precise.size() + params.boxed.size();
  if (used != total) {
    auto check = [&](const auto& m) {
      for (const auto& kv : m) {
        if (std::find(model.inputs.begin(), model.inputs.end(), kv.first) ==
            model.inputs.end()) {
          throw Error(ErrorCode::kInvalidParameterSet,
                      "'" + kv.first + "' is not an input of the model");
        }
      }
    };
    check(params.fixed);
    check(params.precise);
    check(params.boxed);
  }
  return b;
}

Objective guarded(const Model& model) {
  return [&model](std::span<const double> x) {
    try {
      return model.fn(x);
    } catch (const Error& e) {
      throw Error(ErrorCode::kModelEvaluationError, e.what(),
                  std::vector<double>(x.begin(), x.end()));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kModelEvaluationError, e.what(),
                  std::vector<double>(x.begin(), x.end()));
    }
  };
}

struct BoxOutcome {
  Extremum e{};
  int unconverged = 0;
  int evaluations = 0;
};

BoxOutcome solve_box(const Objective& obj, const Binding& b,
                     const std::vector<double>& base, const Hyperrectangle& h,
                     double mass_scale, const PropagationOptions& opt) {
  SearchBox box;
  box.budget = opt.budget;
  box.tol = opt.tol;
  box.bounds.resize(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) box.bounds[i] = {base[i], base[i]};
  for (std::size_t k = 0; k < b.boxed_pos.size(); ++k) {
    box.bounds[b.boxed_pos[k]] = h.intervals[k];
  }
  const OptimizeResult lo = optimize_box(obj, box, Sense::kMin);
  const OptimizeResult hi = optimize_box(obj, box, Sense::kMax);
  BoxOutcome out;
  out.e = {lo.value, std::max(lo.value, hi.value), h.mass * mass_scale};
  out.unconverged = (lo.converged ? 0 : 1) + (hi.converged ? 0 : 1);
  out.evaluations = lo.evaluations + hi.evaluations;
  return out;
}

PropagationResult assemble(std::vector<BoxOutcome> outs) {
  std::vector<Extremum> ex;
  ex.reserve(outs.size());
  std::size_t unconverged = 0;
  std::uint64_t evals = 0;
  for (const BoxOutcome& o : outs) {
    ex.push_back(o.e);
    unconverged += static_cast<std::size_t>(o.unconverged);
    evals += static_cast<std::uint64_t>(o.evaluations);
  }
  const std::size_t n = ex.size();
  return PropagationResult{EmpiricalPBox(std::move(ex)), n, unconverged, evals};
}

std::vector<double> base_values(const Binding& b,
                                 const std::map<std::string, double>& draws) {
  std::vector<double> base = b.fixed_values;
  for (std::size_t k = 0; k < b.precise.size(); ++k) {
    base[b.precise_pos[k]] = draws.at(b.precise[k]);
  }
  return base;
}

void check_samples(int samples) {
  if (samples < 1) {
    throw Error(ErrorCode::kInvalidArgument, "sample count must be >= 1");
  }
}

}  // namespace

// ---- discretization ------------------------------------------------------

DiscretizedPBox discretize_outer(const PBox& p, int n) {
  if (n < 1) {
    throw Error(ErrorCode::kZeroSlices, "number of slices must be >= 1");
  }
  DiscretizedPBox d;
  d.elements.reserve(static_cast<std::size_t>(n));
  const double mass = 1.0 / n;
  for (int j = 1; j <= n; ++j) {
    const double c_prev = static_cast<double>(j - 1) / n;
    const double c = j == n ? 1.0 : static_cast<double>(j) / n;
    const double left =
        j == 1 ? p.support().lo : quasi_inverse(p, Side::kUpper, c_prev).hi;
    const double right = quasi_inverse(p, Side::kLower, c).lo;
    d.elements.push_back({{std::min(left, right), right}, mass});
  }
  return d;
}

double discretized_cdf(const DiscretizedPBox& d, Side side, double theta) {
  double acc = 0.0;
  std::size_t count = 0;
  bool equal_mass = true;
  for (const FocalElement& e : d.elements) {
    equal_mass = equal_mass && e.mass == d.elements.front().mass;
    const double x = side == Side::kLower ? e.interval.hi : e.interval.lo;
    if (x <= theta) {
      acc += e.mass;
      ++count;
    }
  }
  if (count == d.elements.size()) return 1.0;
  // Equal-mass slices: count/n avoids drift from summing 1/n repeatedly.
  if (equal_mass) return static_cast<double>(count) / d.elements.size();
  return std::min(acc, 1.0);
}

// ---- focal product -------------------------------------------------------

FocalProduct::FocalProduct(std::vector<DiscretizedPBox> factors,
                           std::size_t cap, bool allow_over_cap)
    : factors_(std::move(factors)) {
  for (const auto& f : factors_) {
    const std::size_t k = f.elements.size();
    if (k == 0) {
      throw Error(ErrorCode::kZeroSlices, "factor without focal elements");
    }
    if (size_ > std::numeric_limits<std::size_t>::max() / k) {
      throw Error(ErrorCode::kTooManyHyperrectangles,
                  "hyperrectangle count overflows");
    }
    size_ *= k;
  }
  if (size_ > cap && !allow_over_cap) {
    throw Error(ErrorCode::kTooManyHyperrectangles,
                std::to_string(size_) + " hyperrectangles exceed the cap of " +
                    std::to_string(cap));
  }
}

Hyperrectangle FocalProduct::operator[](std::size_t k) const {
  Hyperrectangle h;
  h.intervals.resize(factors_.size());
  h.multi_index.resize(factors_.size());
  // Last factor varies fastest.
  for (std::size_t i = factors_.size(); i-- > 0;) {
    const auto& el = factors_[i].elements;
    const std::size_t j = k % el.size();
    k /= el.size();
    h.intervals[i] = el[j].interval;
    h.multi_index[i] = static_cast<int>(j);
  }
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    h.mass *= factors_[i].elements[static_cast<std::size_t>(h.multi_index[i])].mass;
  }
  return h;
}

// ---- empirical p-box ------------------------------------------------------

EmpiricalPBox::EmpiricalPBox(std::vector<Extremum> extrema)
    : extrema_(std::move(extrema)) {
  if (extrema_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empirical p-box needs extrema");
  }
  double total = 0.0;
  std::vector<std::pair<double, double>> lo, hi;
  for (const Extremum& e : extrema_) {
    if (!std::isfinite(e.y_min) || !std::isfinite(e.y_max) ||
        e.y_min > e.y_max || !(e.mass >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "extremum needs finite y_min <= y_max and mass >= 0");
    }
    total += e.mass;
    lo.push_back({e.y_min, e.mass});
    hi.push_back({e.y_max, e.mass});
  }
  if (std::abs(total - 1.0) > kMassTol) {
    throw Error(ErrorCode::kInvalidArgument,
                "masses sum to " + std::to_string(total));
  }
  sorted_with_cum(std::move(lo), mins_, cmin_);
  sorted_with_cum(std::move(hi), maxs_, cmax_);
}

EmpiricalPBox EmpiricalPBox::from_samples(const std::vector<double>& ys) {
  if (ys.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no samples");
  }
  const double w = 1.0 / static_cast<double>(ys.size());
  std::vector<Extremum> ex;
  ex.reserve(ys.size());
  for (double y : ys) ex.push_back({y, y, w});
  return EmpiricalPBox(std::move(ex));
}

double EmpiricalPBox::step(const std::vector<double>& xs,
                           const std::vector<double>& cum, double y) {
  return cumulative(xs, cum, y);
}

double EmpiricalPBox::lower(double y) const { return step(maxs_, cmax_, y); }
double EmpiricalPBox::upper(double y) const { return step(mins_, cmin_, y); }

std::vector<double> EmpiricalPBox::jumps() const {
  std::vector<double> out = mins_;
  out.insert(out.end(), maxs_.begin(), maxs_.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---- pipelines -----------------------------------------------------------

std::map<std::string, double> sample_precise(const ParameterSet& params,
                                             std::uint64_t seed,
                                             std::uint64_t index) {
  SampleStream stream(seed, index);
  std::map<std::string, double> out;
  for (const auto& [name, dist] : params.precise) {
    out[name] = quantile(dist, stream.uniform());
  }
  return out;
}

PropagationResult propagate_pboxes(const Model& model,
                                   const ParameterSet& params,
                                   const PropagationOptions& opt) {
  if (!params.precise.empty()) {
    throw Error(ErrorCode::kInvalidParameterSet,
                "pure p-box propagation takes no precise parameters");
  }
  const Binding b = bind(model, params, opt.n);
  const FocalProduct product(b.boxed, opt.max_hyperrectangles,
                             opt.allow_over_cap);
  const Objective obj = guarded(model);
  std::vector<BoxOutcome> outs(product.size());
  detail::parallel_for(product.size(), opt.threads, [&](std::size_t k) {
    outs[k] = solve_box(obj, b, b.fixed_values, product[k], 1.0, opt);
  });
  return assemble(std::move(outs));
}

PropagationResult propagate_mixed(const Model& model,
                                  const ParameterSet& params, int samples,
                                  std::uint64_t seed,
                                  const PropagationOptions& opt) {
  check_samples(samples);
  if (params.precise.empty()) return propagate_pboxes(model, params, opt);
  const Binding b = bind(model, params, opt.n);
  const FocalProduct product(b.boxed, opt.max_hyperrectangles,
                             opt.allow_over_cap);
  const std::size_t nsamp = static_cast<std::size_t>(samples);
  std::vector<std::vector<double>> bases(nsamp);
  for (std::size_t i = 0; i < nsamp; ++i) {
    bases[i] = base_values(b, sample_precise(params, seed, i));
  }
  const Objective obj = guarded(model);
  const double scale = 1.0 / static_cast<double>(samples);
  const std::size_t per = product.size();
  std::vector<BoxOutcome> outs(per * nsamp);
  detail::parallel_for(outs.size(), opt.threads, [&](std::size_t t) {
    const std::size_t i = t / per, k = t % per;
    outs[t] = solve_box(obj, b, bases[i], product[k], scale, opt);
  });
  return assemble(std::move(outs));
}

PropagationResult psa_propagate(const Model& model,
                                const ParameterSet& params, int samples,
                                std::uint64_t seed, int threads) {
  check_samples(samples);
  if (!params.boxed.empty()) {
    throw Error(ErrorCode::kInvalidParameterSet,
                "probabilistic sensitivity analysis takes no p-box parameters");
  }
  const Binding b = bind(model, params, 0);
  const Objective obj = guarded(model);
  const std::size_t nsamp = static_cast<std::size_t>(samples);
  const double w = 1.0 / static_cast<double>(samples);
  std::vector<BoxOutcome> outs(nsamp);
  detail::parallel_for(nsamp, threads, [&](std::size_t i) {
    const std::vector<double> x = base_values(b, sample_precise(params, seed, i));
    const double y = obj(x);
    if (!std::isfinite(y)) {
      throw Error(ErrorCode::kNonFiniteObjective, "model outcome not finite", x);
    }
    outs[i].e = {y, y, w};
    outs[i].evaluations = 1;
  });
  return assemble(std::move(outs));
}

}  // namespace pba
