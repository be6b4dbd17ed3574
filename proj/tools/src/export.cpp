#include "pba_app/export.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "pba/error.hpp"

namespace pba::app {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::vector<double> curve_grid(Interval support, int gridsize) {
  if (gridsize < 2) {
    throw Error(ErrorCode::kInvalidArgument, "curve grid needs >= 2 points");
  }
  const double w = support.width();
  const double pad =
      w > 0.0 ? 0.05 * w : 0.05 * std::max(std::abs(support.lo), 1.0);
  const double lo = support.lo - pad;
  const double hi = support.hi + pad;
  std::vector<double> g(static_cast<std::size_t>(gridsize));
  for (int i = 0; i < gridsize; ++i) {
    g[static_cast<std::size_t>(i)] =
        i == gridsize - 1 ? hi : lo + (hi - lo) * i / (gridsize - 1);
  }
  return g;
}

std::vector<CurveRow> curve_rows(const PBox& p, int gridsize) {
  std::vector<CurveRow> rows;
  for (double t : curve_grid(p.support(), gridsize)) {
    rows.push_back({t, eval_bound(p, Side::kLower, t),
                    eval_bound(p, Side::kUpper, t)});
  }
  return rows;
}

std::vector<CurveRow> curve_rows(const EmpiricalPBox& e,
                                 const std::vector<double>& grid) {
  std::vector<CurveRow> rows;
  rows.reserve(grid.size());
  for (double t : grid) rows.push_back({t, e.lower(t), e.upper(t)});
  return rows;
}

std::vector<CurveRow> curve_rows(const EmpiricalPBox& e, int gridsize) {
  return curve_rows(e, curve_grid(e.support(), gridsize));
}

void write_curve(const std::vector<CurveRow>& rows,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << "theta,lbf,ubf\n";
  for (const CurveRow& r : rows) {
    out << format_double(r.theta) << ',' << format_double(r.lbf) << ','
        << format_double(r.ubf) << '\n';
  }
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

void export_curve(const PBox& p, int gridsize,
                  const std::filesystem::path& path) {
  write_curve(curve_rows(p, gridsize), path);
}

void export_curve(const EmpiricalPBox& e, int gridsize,
                  const std::filesystem::path& path) {
  write_curve(curve_rows(e, gridsize), path);
}

}  // namespace pba::app
