#include "pba/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <string>

#include "pba/error.hpp"

namespace pba {

namespace {

void check_box(const SearchBox& box) {
  if (box.bounds.empty()) {
    throw Error(ErrorCode::kInvalidSearchBox, "search box has no dimensions");
  }
  for (std::size_t i = 0; i < box.bounds.size(); ++i) {
    const Interval& iv = box.bounds[i];
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi) {
      throw Error(ErrorCode::kInvalidSearchBox,
                  "invalid interval in dimension " + std::to_string(i));
    }
  }
  if (box.budget < 1) {
    throw Error(ErrorCode::kInvalidSearchBox, "budget must be >= 1");
  }
  if (!(box.tol > 0.0)) {
    throw Error(ErrorCode::kInvalidSearchBox, "tol must be positive");
  }
}

double checked_eval(const Objective& f, const std::vector<double>& x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::kNonFiniteObjective, "objective is not finite", x);
  }
  return v;
}

struct Rect {
  std::vector<double> center;  // unit-cube coordinates of free dimensions
  std::vector<int> level;      // side length is 3^-level
  double f;
  double diam = 0.0;
};

double diameter(const std::vector<int>& level) {
  std::vector<int> s = level;
  std::sort(s.begin(), s.end());
  double sum = 0.0;
  for (int k : s) sum += std::pow(9.0, -k);
  return 0.5 * std::sqrt(sum);
}

class Direct {
 public:
  Direct(const Objective& f, const SearchBox& box, Sense sense)
      : f_(f), box_(box), sign_(sense == Sense::kMax ? -1.0 : 1.0) {
    for (std::size_t i = 0; i < box.bounds.size(); ++i) {
      if (box.bounds[i].hi > box.bounds[i].lo) free_.push_back(i);
    }
  }

  OptimizeResult run() {
    OptimizeResult res;
    if (free_.empty()) {
      std::vector<double> x(box_.bounds.size());
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = box_.bounds[i].lo;
      res.value = checked_eval(f_, x);
      res.argpoint = std::move(x);
      res.converged = true;
      res.evaluations = 1;
      return res;
    }
    const std::size_t d = free_.size();
    add(Rect{std::vector<double>(d, 0.5), std::vector<int>(d, 0),
             eval(std::vector<double>(d, 0.5))});
    const double target = box_.tol * diameter(std::vector<int>(d, 0));

    bool converged = rects_[best_].diam < target;
    bool exhausted = false;
    while (!converged && !exhausted) {
      const std::vector<std::size_t> chosen = select();
      for (std::size_t id : chosen) {
        if (!divide(id)) {
          exhausted = true;
          break;
        }
      }
      converged = rects_[best_].diam < target;
    }
    res.argpoint = point(rects_[best_].center);
    res.value = sign_ * rects_[best_].f;
    res.converged = converged;
    res.evaluations = evals_;
    return res;
  }

 private:
  using Entry = std::pair<double, std::size_t>;
  using Heap =
      std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>>;

  std::vector<double> point(const std::vector<double>& u) const {
    std::vector<double> x(box_.bounds.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = box_.bounds[i].lo;
    for (std::size_t k = 0; k < free_.size(); ++k) {
      const Interval& iv = box_.bounds[free_[k]];
      x[free_[k]] = std::min(iv.hi, iv.lo + u[k] * (iv.hi - iv.lo));
    }
    return x;
  }

  double eval(const std::vector<double>& u) {
    ++evals_;
    return sign_ * checked_eval(f_, point(u));
  }

  void add(Rect r) {
    const std::size_t id = rects_.size();
    r.diam = diameter(r.level);
    const double diam = r.diam;
    const double fv = r.f;
    rects_.push_back(std::move(r));
    groups_[diam].push({fv, id});
    if (id == 0 || fv < rects_[best_].f ||
        (fv == rects_[best_].f && diam < rects_[best_].diam)) {
      best_ = id;
    }
  }

  // Best rectangle of each diameter class on the lower-right convex hull.
  std::vector<std::size_t> select() {
    std::vector<std::pair<double, Entry>> pts;  // (diameter, (f, id))
    for (const auto& [diam, heap] : groups_) {
      if (!heap.empty()) pts.push_back({diam, heap.top()});
    }
    std::size_t start = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (pts[i].second.first <= pts[start].second.first) start = i;
    }
    std::vector<std::size_t> hull;
    auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
      const double ax = pts[a].first - pts[o].first;
      const double ay = pts[a].second.first - pts[o].second.first;
      const double bx = pts[b].first - pts[o].first;
      const double by = pts[b].second.first - pts[o].second.first;
      return ax * by - ay * bx;
    };
    for (std::size_t i = start; i < pts.size(); ++i) {
      while (hull.size() >= 2 &&
             cross(hull[hull.size() - 2], hull.back(), i) < 0.0) {
        hull.pop_back();
      }
      hull.push_back(i);
    }
    std::vector<std::size_t> ids;
    for (std::size_t h : hull) {
      groups_[pts[h].first].pop();
      ids.push_back(pts[h].second.second);
    }
    return ids;
  }

  // Trisects rectangle id along all of its longest sides. Returns false
  // when the budget cannot cover the new samples.
  bool divide(std::size_t id) {
    const Rect r = rects_[id];
    const int kmin = *std::min_element(r.level.begin(), r.level.end());
    std::vector<std::size_t> dims;
    for (std::size_t k = 0; k < r.level.size(); ++k) {
      if (r.level[k] == kmin) dims.push_back(k);
    }
    if (evals_ + 2 * static_cast<int>(dims.size()) > box_.budget) {
      groups_[r.diam].push({r.f, id});
      return false;
    }
    const double delta = std::pow(3.0, -(kmin + 1));
    std::vector<double> fminus(dims.size()), fplus(dims.size()), w(dims.size());
    std::vector<std::vector<double>> cminus(dims.size()), cplus(dims.size());
    for (std::size_t j = 0; j < dims.size(); ++j) {
      cminus[j] = r.center;
      cplus[j] = r.center;
      cminus[j][dims[j]] -= delta;
      cplus[j][dims[j]] += delta;
      fminus[j] = eval(cminus[j]);
      fplus[j] = eval(cplus[j]);
      w[j] = std::min(fminus[j], fplus[j]);
    }
    std::vector<std::size_t> order(dims.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return w[x] < w[y]; });
    std::vector<int> level = r.level;
    for (std::size_t j : order) {
      level[dims[j]] += 1;
      add(Rect{cminus[j], level, fminus[j]});
      add(Rect{cplus[j], level, fplus[j]});
    }
    rects_[id].level = level;
    rects_[id].diam = diameter(level);
    groups_[rects_[id].diam].push({r.f, id});
    if (r.f == rects_[best_].f && rects_[id].diam < rects_[best_].diam) {
      best_ = id;
    }
    return true;
  }

  const Objective& f_;
  const SearchBox& box_;
  double sign_;
  std::vector<std::size_t> free_;
  std::vector<Rect> rects_;
  std::map<double, Heap> groups_;
  std::size_t best_ = 0;
  int evals_ = 0;
};

}  // namespace

OptimizeResult optimize_box(const Objective& f, const SearchBox& box,
                            Sense sense) {
  check_box(box);
  return Direct(f, box, sense).run();
}

VertexExtrema vertex_extrema(const Objective& f, const SearchBox& box,
                             int max_dim) {
  check_box(box);
  const std::size_t d = box.bounds.size();
  if (static_cast<int>(d) > max_dim || d >= 31) {
    throw Error(ErrorCode::kDimensionTooLarge,
                "vertex enumeration over " + std::to_string(d) +
                    " dimensions exceeds the limit of " +
                    std::to_string(max_dim));
  }
  VertexExtrema out;
  out.min = std::numeric_limits<double>::infinity();
  out.max = -std::numeric_limits<double>::infinity();
  std::vector<double> x(d);
  for (unsigned long mask = 0; mask < (1ul << d); ++mask) {
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = (mask >> i) & 1ul ? box.bounds[i].hi : box.bounds[i].lo;
    }
    const double v = checked_eval(f, x);
    ++out.evaluations;
    out.min = std::min(out.min, v);
    out.max = std::max(out.max, v);
  }
  return out;
}

}  // namespace pba
