#include "wqkd/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include "wqkd/errors.hpp"

namespace wqkd {

namespace {

struct Vertex {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
};

double checked_eval(const Objective2D& objective, double x, double y) {
  const double v = objective(x, y);
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "objective is not finite at (" << x << ", " << y << "): " << v;
    throw NumericalError(msg.str());
  }
  return v;
}

double reduce_to_period(double x) {
  double r = std::fmod(x, std::numbers::pi);
  if (r < 0.0) r += std::numbers::pi;
  if (r >= std::numbers::pi) r = 0.0;
  return r;
}

double simplex_radius(const std::array<Vertex, 3>& s) {
  double radius = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    radius = std::max(radius, std::hypot(s[i].x - s[0].x, s[i].y - s[0].y));
  }
  return radius;
}

}  // namespace

Objective2D make_objective(AttackObjective objective) {
  return [objective](double a, double b) { return evaluate_attack_objective(objective, a, b); };
}

ScanGrid::ScanGrid(std::size_t resolution, std::vector<double> values)
    : resolution_(resolution), values_(std::move(values)) {
  if (resolution_ < 2) {
    throw InputError("scan resolution must be at least 2");
  }
  if (values_.size() != resolution_ * resolution_) {
    throw InputError("scan grid needs resolution^2 values");
  }
}

double ScanGrid::spacing() const { return std::numbers::pi / static_cast<double>(resolution_); }

double ScanGrid::coordinate(std::size_t index) const {
  return static_cast<double>(index) * spacing();
}

GridScanResult grid_scan(const Objective2D& objective, std::size_t resolution, unsigned workers) {
  if (resolution < 2) {
    throw InputError("scan resolution must be at least 2, got " + std::to_string(resolution));
  }
  const double step = std::numbers::pi / static_cast<double>(resolution);
  std::vector<double> values(resolution * resolution);

  auto fill_rows = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double a = static_cast<double>(i) * step;
      for (std::size_t j = 0; j < resolution; ++j) {
        values[i * resolution + j] = objective(a, static_cast<double>(j) * step);
      }
    }
  };

  const std::size_t n_workers = std::clamp<std::size_t>(workers, 1, resolution);
  if (n_workers == 1) {
    fill_rows(0, resolution);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    const std::size_t chunk = (resolution + n_workers - 1) / n_workers;
    for (std::size_t w = 0; w < n_workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(resolution, begin + chunk);
      if (begin < end) pool.emplace_back(fill_rows, begin, end);
    }
  }

  std::size_t best = 0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k])) {
      const std::size_t i = k / resolution;
      const std::size_t j = k % resolution;
      checked_eval(objective, static_cast<double>(i) * step, static_cast<double>(j) * step);
      throw NumericalError("objective is not finite at grid node " + std::to_string(k));
    }
    if (values[k] < values[best]) best = k;
  }

  const std::size_t row = best / resolution;
  const std::size_t col = best % resolution;
  const double min_value = values[best];
  GridScanResult result{ScanGrid(resolution, std::move(values)), row, col,
                        AnglePair{Angle(static_cast<double>(row) * step),
                                  Angle(static_cast<double>(col) * step)},
                        min_value};
  return result;
}

OptimizationResult refine(const Objective2D& objective, AnglePair start,
                          const RefineOptions& options) {
  if (!(options.tolerance > 0.0) || !std::isfinite(options.tolerance)) {
    throw InputError("refine tolerance must be positive");
  }
  if (!(options.initial_step > 0.0) || !std::isfinite(options.initial_step)) {
    throw InputError("refine initial step must be positive");
  }

  auto eval = [&](double x, double y) { return Vertex{x, y, checked_eval(objective, x, y)}; };

  const double x0 = start.phi_a.radians();
  const double y0 = start.phi_b.radians();
  std::array<Vertex, 3> s{eval(x0, y0), eval(x0 + options.initial_step, y0),
                          eval(x0, y0 + options.initial_step)};
  auto by_value = [](const Vertex& l, const Vertex& r) { return l.value < r.value; };

  OptimizationResult result;
  std::size_t iter = 0;
  for (;; ++iter) {
    std::stable_sort(s.begin(), s.end(), by_value);
    const double radius = simplex_radius(s);
    if (radius < options.tolerance) {
      result.converged = true;
      result.final_step = radius;
      break;
    }
    if (iter >= options.max_iterations) {
      result.final_step = radius;
      break;
    }

    const double cx = 0.5 * (s[0].x + s[1].x);
    const double cy = 0.5 * (s[0].y + s[1].y);
    const Vertex& worst = s[2];
    const Vertex reflected = eval(2.0 * cx - worst.x, 2.0 * cy - worst.y);

    if (reflected.value < s[0].value) {
      const Vertex expanded = eval(3.0 * cx - 2.0 * worst.x, 3.0 * cy - 2.0 * worst.y);
      s[2] = expanded.value < reflected.value ? expanded : reflected;
      continue;
    }
    if (reflected.value < s[1].value) {
      s[2] = reflected;
      continue;
    }
    if (reflected.value < worst.value) {
      const Vertex outside = eval(0.5 * (cx + reflected.x), 0.5 * (cy + reflected.y));
      if (outside.value <= reflected.value) {
        s[2] = outside;
        continue;
      }
    } else {
      const Vertex inside = eval(0.5 * (cx + worst.x), 0.5 * (cy + worst.y));
      if (inside.value < worst.value) {
        s[2] = inside;
        continue;
      }
    }
    // shrink toward the best vertex
    for (std::size_t i = 1; i < s.size(); ++i) {
      s[i] = eval(0.5 * (s[0].x + s[i].x), 0.5 * (s[0].y + s[i].y));
    }
  }

  result.argmin = AnglePair{Angle(s[0].x), Angle(s[0].y)};
  result.min_value = s[0].value;
  result.iterations = iter;
  return result;
}

OptimizationResult find_min(AttackObjective objective, const SearchOptions& options) {
  const Objective2D f = make_objective(objective);
  const GridScanResult scan = grid_scan(f, options.resolution, options.workers);
  RefineOptions refine_options;
  refine_options.tolerance = options.tolerance;
  refine_options.initial_step = scan.grid.spacing();
  OptimizationResult result = refine(f, scan.argmin, refine_options);

  const double a = reduce_to_period(result.argmin.phi_a.radians());
  const double b = reduce_to_period(result.argmin.phi_b.radians());
  result.argmin = AnglePair{Angle(a), Angle(b)};
  result.min_value = checked_eval(f, a, b);
  return result;
}

OptimizationResult find_min_w_eve(const SearchOptions& options) {
  return find_min(AttackObjective::W, options);
}

OptimizationResult find_min_wtilde_eve(const SearchOptions& options) {
  return find_min(AttackObjective::WTilde, options);
}

OptimizationResult find_min_intercept_resend(const SearchOptions& options) {
  return find_min(AttackObjective::InterceptResend, options);
}

void write_scan_csv(std::ostream& out, const ScanGrid& grid) {
  out << "phi_a,phi_b,value\n";
  char line[96];
  const std::size_t n = grid.resolution();
  for (std::size_t i = 0; i < n; ++i) {
    const double a = grid.coordinate(i);
    for (std::size_t j = 0; j < n; ++j) {
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", a, grid.coordinate(j), grid.at(i, j));
      out << line;
    }
  }
  if (!out) {
    throw IoError("failed writing scan CSV");
  }
}

}  // namespace wqkd
