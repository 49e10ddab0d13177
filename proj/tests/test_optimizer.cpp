#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "wqkd/errors.hpp"
#include "wqkd/optimizer.hpp"

using namespace wqkd;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("grid scan locates the known minima") {
  const auto wt = grid_scan(make_objective(AttackObjective::WTilde), 720);
  CHECK(std::abs(wt.min_value - 0.04428) <= 5e-4);
  CHECK(wt.grid.values().size() == 720u * 720u);
  CHECK(wt.min_value == wt.grid.at(wt.argmin_row, wt.argmin_col));

  const auto w = grid_scan(make_objective(AttackObjective::W), 720);
  CHECK(w.min_value < -0.125);
}

TEST_CASE("grid scan tie-break is row-major first occurrence") {
  const auto zero = grid_scan([](double, double) { return 0.0; }, 16);
  CHECK(zero.min_value == 0.0);
  CHECK(zero.argmin_row == 0);
  CHECK(zero.argmin_col == 0);

  // Two equal minima; the earlier row wins.
  const auto two = grid_scan(
      [](double a, double b) {
        const bool hit = (std::abs(a - 3 * kPi / 8) < 1e-9 || std::abs(a - kPi / 8) < 1e-9) &&
                         std::abs(b - kPi / 4) < 1e-9;
        return hit ? -1.0 : 0.0;
      },
      8);
  CHECK(two.argmin_row == 1);
  CHECK(two.argmin_col == 2);
}

TEST_CASE("grid scan is independent of worker count") {
  const auto f = make_objective(AttackObjective::WTilde);
  const auto one = grid_scan(f, 301, 1);
  const auto many = grid_scan(f, 301, 7);
  CHECK(one.grid.values() == many.grid.values());
  CHECK(one.argmin_row == many.argmin_row);
  CHECK(one.argmin_col == many.argmin_col);
}

TEST_CASE("doubling the resolution never raises the grid minimum") {
  for (const auto obj : {AttackObjective::W, AttackObjective::WTilde, AttackObjective::InterceptResend}) {
    for (const std::size_t n : {7u, 30u, 90u, 360u}) {
      const auto coarse = grid_scan(make_objective(obj), n);
      const auto fine = grid_scan(make_objective(obj), 2 * n);
      CHECK(fine.min_value <= coarse.min_value + 1e-12);
    }
  }
}

TEST_CASE("grid scan errors") {
  CHECK_THROWS_AS(grid_scan([](double, double) { return 0.0; }, 1), InputError);
  try {
    grid_scan([](double a, double) { return a > 1.0 ? std::numeric_limits<double>::quiet_NaN() : 0.0; }, 4);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("not finite at") != std::string::npos);
  }
}

TEST_CASE("refine solves a convex bowl") {
  const auto bowl = [](double x, double y) { return (x - 1) * (x - 1) + (y - 2) * (y - 2); };
  const auto r = refine(bowl, {Angle(0), Angle(0)});
  CHECK(r.converged);
  CHECK(std::abs(r.argmin.phi_a.radians() - 1.0) <= 1e-8);
  CHECK(std::abs(r.argmin.phi_b.radians() - 2.0) <= 1e-8);
  CHECK(r.final_step < 1e-10);
  CHECK(r.min_value == bowl(r.argmin.phi_a.radians(), r.argmin.phi_b.radians()));
}

TEST_CASE("refine improves on the exhibited attack point") {
  const auto f = make_objective(AttackObjective::W);
  const AnglePair start{Angle::pi_multiple(0.6), Angle::pi_multiple(0.4)};
  const auto r = refine(f, start);
  CHECK(r.min_value <= -0.1995);
  CHECK(r.min_value <= f(start.phi_a.radians(), start.phi_b.radians()) + 1e-15);
}

TEST_CASE("refine never ends above its start") {
  const auto f = make_objective(AttackObjective::WTilde);
  for (double a = 0.05; a < kPi; a += 0.37) {
    for (double b = 0.11; b < kPi; b += 0.41) {
      const auto r = refine(f, {Angle(a), Angle(b)});
      CHECK(r.min_value <= f(a, b) + 1e-15);
    }
  }
}

TEST_CASE("refine reports a capped run as not converged") {
  RefineOptions opts;
  opts.max_iterations = 3;
  const auto r = refine([](double x, double y) { return x * x + y * y; }, {Angle(5), Angle(5)}, opts);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 3);
  CHECK(r.min_value <= 50.0);
  CHECK_THROWS_AS(refine([](double, double) { return 0.0; }, {Angle(0), Angle(0)}, RefineOptions{0.0}),
                  InputError);
}

TEST_CASE("find_min reproduces the extremal values") {
  const auto wt = find_min_wtilde_eve();
  CHECK(std::abs(wt.min_value - 0.04428) <= 5e-4);
  CHECK(wt.converged);
  CHECK(wt.argmin.phi_a.radians() >= 0.0);
  CHECK(wt.argmin.phi_a.radians() < kPi);
  CHECK(std::abs(wt.min_value - evaluate_attack_objective(AttackObjective::WTilde,
                                                          wt.argmin.phi_a.radians(),
                                                          wt.argmin.phi_b.radians())) <= 1e-12);

  const auto oracle_min = oracle::brute_force_min(oracle::wtilde_from_states, 1000);
  CHECK(wt.min_value <= oracle_min.value + 1e-12);
  CHECK(oracle_min.value - wt.min_value <= 1e-5);

  CHECK(std::abs(find_min_intercept_resend().min_value - 0.0625) <= 1e-9);
  CHECK(find_min_w_eve().min_value <= -0.1995);
}

TEST_CASE("find_min is deterministic") {
  const auto a = find_min_w_eve();
  const auto b = find_min_w_eve({720, 1e-10, 4});
  CHECK(a.min_value == b.min_value);
  CHECK(a.argmin.phi_a == b.argmin.phi_a);
  CHECK(a.argmin.phi_b == b.argmin.phi_b);
}

TEST_CASE("scan CSV layout") {
  const auto scan = grid_scan(make_objective(AttackObjective::W), 2);
  std::ostringstream out;
  write_scan_csv(out, scan.grid);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "phi_a,phi_b,value");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
  CHECK(out.str().find("1.5707963267948966") != std::string::npos);
}
