#include "pba/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "pba/error.hpp"

namespace pba {

namespace {

constexpr double kMassTol = 1e-12;
constexpr double kResidualTol = 1e-9;

// Linear constraint rows evaluated at a support point x.
struct Constraints {
  Statistics s;
  bool median_low_active = false;   // sum_{x <= m} p = 1/2
  bool median_high_active = false;  // sum_{x >= m} p = 1/2

  int rows() const {
    int r = 1;
    if (s.mean) ++r;
    if (s.sd) ++r;
    if (median_low_active) ++r;
    if (median_high_active) ++r;
    return r;
  }

  void column(double x, Eigen::Ref<Eigen::VectorXd> col) const {
    int r = 0;
    col(r++) = 1.0;
    if (s.mean) col(r++) = x;
    if (s.sd) col(r++) = x * x;
    if (median_low_active) col(r++) = x <= *s.median ? 1.0 : 0.0;
    if (median_high_active) col(r++) = x >= *s.median ? 1.0 : 0.0;
  }

  void rhs(Eigen::Ref<Eigen::VectorXd> v) const {
    int r = 0;
    v(r++) = 1.0;
    if (s.mean) v(r++) = *s.mean;
    if (s.sd) v(r++) = *s.mean * *s.mean + *s.sd * *s.sd;
    if (median_low_active) v(r++) = 0.5;
    if (median_high_active) v(r++) = 0.5;
  }
};

struct Extremes {
  std::vector<double> lo;
  std::vector<double> hi;
  bool any = false;
};

void consider(const std::array<double, 3>& xs, const Eigen::VectorXd& p,
              int k, const Statistics& s, std::span<const double> thetas,
              Extremes& ex) {
  for (int i = 0; i < k; ++i) {
    if (!(p(i) >= -kMassTol && p(i) <= 1.0 + kMassTol)) return;
  }
  if (s.median) {
    double below = 0.0, above = 0.0;
    for (int i = 0; i < k; ++i) {
      if (xs[i] <= *s.median) below += p(i);
      if (xs[i] >= *s.median) above += p(i);
    }
    if (below < 0.5 - kResidualTol || above < 0.5 - kResidualTol) return;
  }
  ex.any = true;
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    double f = 0.0;
    for (int i = 0; i < k; ++i) {
      if (xs[i] <= thetas[t]) f += p(i);
    }
    f = std::clamp(f, 0.0, 1.0);
    ex.lo[t] = std::min(ex.lo[t], f);
    ex.hi[t] = std::max(ex.hi[t], f);
  }
}

}  // namespace

std::vector<Interval> oracle_cdf_bounds(const MinimalData& d,
                                        std::span<const double> thetas,
                                        int gridsize) {
  if (gridsize < 11) {
    throw Error(ErrorCode::kInvalidArgument, "oracle grid needs >= 11 points");
  }
  const Statistics s = statistics(validate_minimal_data(d));
  std::vector<double> grid(static_cast<std::size_t>(gridsize));
  for (int i = 0; i < gridsize; ++i) {
    grid[static_cast<std::size_t>(i)] =
        i == gridsize - 1 ? s.b : s.a + (s.b - s.a) * i / (gridsize - 1);
  }

  Extremes ex;
  ex.lo.assign(thetas.size(), std::numeric_limits<double>::infinity());
  ex.hi.assign(thetas.size(), -std::numeric_limits<double>::infinity());

  std::vector<Constraints> systems;
  const int median_options = s.median ? 2 : 1;
  for (int lo_act = 0; lo_act < median_options; ++lo_act) {
    for (int hi_act = 0; hi_act < median_options; ++hi_act) {
      Constraints c;
      c.s = s;
      c.median_low_active = lo_act == 1;
      c.median_high_active = hi_act == 1;
      if (c.rows() <= 3) systems.push_back(c);
    }
  }

  const int n = gridsize;
  for (const Constraints& c : systems) {
    const int k = c.rows();
    Eigen::MatrixXd A(k, k);
    Eigen::VectorXd rhs(k);
    c.rhs(rhs);
    std::array<double, 3> xs{};
    auto solve_and_consider = [&]() {
      for (int j = 0; j < k; ++j) c.column(xs[j], A.col(j));
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (!lu.isInvertible()) return;
      Eigen::VectorXd p = lu.solve(rhs);
      if ((A * p - rhs).norm() > kResidualTol) return;
      consider(xs, p, k, s, thetas, ex);
    };
    if (k == 1) {
      for (int i = 0; i < n; ++i) {
        xs[0] = grid[i];
        solve_and_consider();
      }
    } else if (k == 2) {
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          xs = {grid[i], grid[j], 0.0};
          solve_and_consider();
        }
      }
    } else {
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          for (int l = j + 1; l < n; ++l) {
            xs = {grid[i], grid[j], grid[l]};
            solve_and_consider();
          }
        }
      }
    }
  }
  if (!ex.any) {
    throw Error(ErrorCode::kInvalidArgument,
                "no grid distribution satisfies the data; refine the grid");
  }
  std::vector<Interval> out(thetas.size());
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    out[t] = {ex.lo[t], ex.hi[t]};
  }
  return out;
}

Interval oracle_cdf_bounds(const MinimalData& d, double theta, int gridsize) {
  const double t[1] = {theta};
  return oracle_cdf_bounds(d, t, gridsize)[0];
}

}  // namespace pba
