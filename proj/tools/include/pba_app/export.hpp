#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pba/pbox.hpp"
#include "pba/propagation.hpp"

namespace pba::app {

struct CurveRow {
  double theta;
  double lbf;
  double ubf;
};

// Shortest decimal that reads back to the same double.
std::string format_double(double x);

// gridsize evenly spaced points over the support widened by 5% per side.
std::vector<double> curve_grid(Interval support, int gridsize);

std::vector<CurveRow> curve_rows(const PBox& p, int gridsize);
std::vector<CurveRow> curve_rows(const EmpiricalPBox& e, int gridsize);
std::vector<CurveRow> curve_rows(const EmpiricalPBox& e,
                                 const std::vector<double>& grid);

// CSV with header theta,lbf,ubf.
void write_curve(const std::vector<CurveRow>& rows,
                 const std::filesystem::path& path);

void export_curve(const PBox& p, int gridsize, const std::filesystem::path& path);
void export_curve(const EmpiricalPBox& e, int gridsize,
                  const std::filesystem::path& path);

}  // namespace pba::app
