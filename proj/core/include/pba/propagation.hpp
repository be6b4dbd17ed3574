#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pba/distributions.hpp"
#include "pba/interval.hpp"
#include "pba/minimal_data.hpp"
#include "pba/models.hpp"
#include "pba/optimizer.hpp"
#include "pba/pbox.hpp"

namespace pba {

struct FocalElement {
  Interval interval;
  double mass;
};

struct DiscretizedPBox {
  std::vector<FocalElement> elements;
};

// n equal-mass slices; slice j covers probabilities ((j-1)/n, j/n] and maps
// to [inf{ubf > (j-1)/n}, inf{lbf >= j/n}], the first slice starting at a.
DiscretizedPBox discretize_outer(const PBox& p, int n);

// Step bounds implied by focal elements: lower cumulates right endpoints,
// upper cumulates left endpoints.
double discretized_cdf(const DiscretizedPBox& d, Side side, double theta);

struct Hyperrectangle {
  std::vector<Interval> intervals;
  double mass = 1.0;
  std::vector<int> multi_index;
};

inline constexpr std::size_t kDefaultMaxHyperrectangles = 1000000;

// Cartesian product of focal elements under random-set independence,
// produced on demand. An empty input list yields one box of mass 1.
class FocalProduct {
 public:
  explicit FocalProduct(std::vector<DiscretizedPBox> factors,
                        std::size_t cap = kDefaultMaxHyperrectangles,
                        bool allow_over_cap = false);

  std::size_t size() const { return size_; }
  Hyperrectangle operator[](std::size_t k) const;

  class iterator {
   public:
    using value_type = Hyperrectangle;
    using difference_type = std::ptrdiff_t;
    iterator(const FocalProduct* p, std::size_t k) : p_(p), k_(k) {}
    Hyperrectangle operator*() const { return (*p_)[k_]; }
    iterator& operator++() {
      ++k_;
      return *this;
    }
    bool operator==(const iterator& o) const { return k_ == o.k_; }

   private:
    const FocalProduct* p_;
    std::size_t k_;
  };
  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, size_}; }

 private:
  std::vector<DiscretizedPBox> factors_;
  std::size_t size_ = 1;
};

struct Extremum {
  double y_min;
  double y_max;
  double mass;
};

// Weighted step bounds on an outcome CDF. Boxes contribute their minimum to
// the upper step (stochastically smaller) and their maximum to the lower.
class EmpiricalPBox {
 public:
  explicit EmpiricalPBox(std::vector<Extremum> extrema);
  // Equal-weight empirical CDF of point outcomes (both steps coincide).
  static EmpiricalPBox from_samples(const std::vector<double>& ys);

  double lower(double y) const;
  double upper(double y) const;
  double bound(Side side, double y) const {
    return side == Side::kLower ? lower(y) : upper(y);
  }
  Interval support() const { return {mins_.front(), maxs_.back()}; }
  const std::vector<Extremum>& extrema() const { return extrema_; }
  // Sorted jump locations of both steps.
  std::vector<double> jumps() const;

 private:
  std::vector<Extremum> extrema_;
  std::vector<double> mins_, maxs_;      // sorted
  std::vector<double> cmin_, cmax_;      // cumulative masses
  static double step(const std::vector<double>& xs,
                     const std::vector<double>& cum, double y);
};

struct ParameterSet {
  std::map<std::string, double> fixed;
  std::map<std::string, DistributionSpec> precise;
  std::map<std::string, MinimalData> boxed;
};

struct PropagationOptions {
  int n = 50;
  int budget = 2000;
  double tol = 1e-6;
  // 0 uses all hardware threads.
  int threads = 1;
  std::size_t max_hyperrectangles = kDefaultMaxHyperrectangles;
  bool allow_over_cap = false;
};

struct PropagationResult {
  EmpiricalPBox pbox;
  std::size_t boxes = 0;
  // Optimizations that hit the budget before meeting the tolerance.
  std::size_t unconverged = 0;
  std::uint64_t evaluations = 0;
};

PropagationResult propagate_pboxes(const Model& model,
                                   const ParameterSet& params,
                                   const PropagationOptions& opt);

PropagationResult propagate_mixed(const Model& model,
                                  const ParameterSet& params, int samples,
                                  std::uint64_t seed,
                                  const PropagationOptions& opt);

PropagationResult psa_propagate(const Model& model,
                                const ParameterSet& params, int samples,
                                std::uint64_t seed, int threads = 1);

// Values of the precise parameters for Monte Carlo sample `index`, drawn in
// name order from that sample's own stream.
std::map<std::string, double> sample_precise(const ParameterSet& params,
                                             std::uint64_t seed,
                                             std::uint64_t index);

}  // namespace pba
