#pragma once

// Derivative-free search over Eve's preparation angles: an exhaustive grid
// scan over the fundamental domain [0, pi) x [0, pi) followed by a
// Nelder-Mead simplex refinement from the best grid node.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "wqkd/adversary.hpp"
#include "wqkd/quantum_model.hpp"

namespace wqkd {

using Objective2D = std::function<double(double phi_a, double phi_b)>;

Objective2D make_objective(AttackObjective objective);

struct AnglePair {
  Angle phi_a;
  Angle phi_b;
};

// Row-major matrix of objective values on the nodes (i, j) * pi / resolution.
// Row index follows phi_a, column index phi_b.
class ScanGrid {
 public:
  ScanGrid(std::size_t resolution, std::vector<double> values);

  std::size_t resolution() const { return resolution_; }
  double spacing() const;
  double coordinate(std::size_t index) const;
  double at(std::size_t row, std::size_t col) const { return values_[row * resolution_ + col]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t resolution_;
  std::vector<double> values_;
};

struct GridScanResult {
  ScanGrid grid;
  std::size_t argmin_row = 0;
  std::size_t argmin_col = 0;
  AnglePair argmin;
  double min_value = 0.0;
};

// Evaluates `objective` on every node. Rows are split across `workers`
// threads; the argmin is reduced in row-major order so the first
// occurrence wins ties regardless of worker count. Throws InputError for
// resolution < 2 and NumericalError on a non-finite value.
GridScanResult grid_scan(const Objective2D& objective, std::size_t resolution,
                         unsigned workers = 1);

struct RefineOptions {
  double tolerance = 1e-10;
  std::size_t max_iterations = 20000;
  double initial_step = 0.05;
};

struct OptimizationResult {
  AnglePair argmin;
  double min_value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  // Largest distance from the best vertex to any other vertex at exit.
  double final_step = 0.0;
};

// Nelder-Mead descent. The best vertex value never increases; terminates
// when the simplex radius drops below options.tolerance (converged) or the
// iteration cap is hit (converged = false, best point still returned).
OptimizationResult refine(const Objective2D& objective, AnglePair start,
                          const RefineOptions& options = {});

struct SearchOptions {
  std::size_t resolution = 720;
  double tolerance = 1e-10;
  unsigned workers = 1;
};

// grid_scan followed by refine from the grid argmin; the reported argmin is
// reduced into [0, pi) x [0, pi).
OptimizationResult find_min(AttackObjective objective, const SearchOptions& options = {});
OptimizationResult find_min_w_eve(const SearchOptions& options = {});
OptimizationResult find_min_wtilde_eve(const SearchOptions& options = {});
OptimizationResult find_min_intercept_resend(const SearchOptions& options = {});

// CSV with header `phi_a,phi_b,value`, 17 significant digits.
void write_scan_csv(std::ostream& out, const ScanGrid& grid);

}  // namespace wqkd
