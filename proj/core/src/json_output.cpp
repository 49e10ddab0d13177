#include <cstdio>
#include <optional>

#include "json_text.hpp"
#include "wqkd/io.hpp"

namespace wqkd {

using detail::Json;

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json optional_bool(const std::optional<bool>& v) { return v ? Json(*v) : Json(nullptr); }

Json estimate_json(const std::optional<ParameterEstimate>& e) {
  if (!e) return Json(nullptr);
  Json j = Json::object();
  j["value"] = e->value;
  j["std_error"] = e->std_error;
  return j;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string to_json(const SecurityReport& report) {
  Json j = Json::object();
  j["protocol"] = std::string(to_string(report.protocol));
  j["w"] = report.w;
  j["w_tilde"] = report.w_tilde;
  j["w_tilde_prime"] = optional_number(report.w_tilde_prime);
  j["qber"] = report.qber;
  j["naive_wigner_violated"] = report.naive_wigner_violated;
  j["modified_wigner_violated"] = report.modified_wigner_violated;
  j["original_protocol_secure"] = report.original_protocol_secure;
  return detail::dump_json(j) + "\n";
}

std::string to_json(const OptimizationResult& result, AttackObjective objective) {
  Json j = Json::object();
  j["objective"] = std::string(to_string(objective));
  j["phi_a"] = result.argmin.phi_a.radians();
  j["phi_b"] = result.argmin.phi_b.radians();
  j["min_value"] = result.min_value;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["final_step"] = result.final_step;
  return detail::dump_json(j) + "\n";
}

std::string grid_minimum_json(const GridScanResult& scan, AttackObjective objective) {
  Json j = Json::object();
  j["objective"] = std::string(to_string(objective));
  j["resolution"] = scan.grid.resolution();
  j["phi_a"] = scan.argmin.phi_a.radians();
  j["phi_b"] = scan.argmin.phi_b.radians();
  j["min_value"] = scan.min_value;
  return detail::dump_json(j) + "\n";
}

std::string to_json(const SiftingResult& r) {
  Json j = Json::object();
  j["variant"] = std::string(to_string(r.variant));
  j["n_pairs"] = r.n_pairs;
  j["sacrifice_fraction"] = r.sacrifice_fraction;

  Json estimates = Json::object();
  estimates["w"] = estimate_json(r.est_w);
  estimates["w_tilde"] = estimate_json(r.est_w_tilde);
  if (r.variant == Protocol::Extended9) {
    estimates["w_tilde_prime"] = estimate_json(r.est_w_tilde_prime);
  }
  estimates["qber"] = estimate_json(r.est_qber);
  j["estimates"] = std::move(estimates);

  Json counts = Json::object();
  counts["key_rounds"] = r.key_rounds;
  counts["disclosed_rounds"] = r.disclosed_rounds;
  counts["test_rounds"] = r.test_rounds;
  counts["key_length"] = r.alice_key.size();
  counts["key_mismatches"] = r.key_mismatches;
  Json cells = Json::object();
  for (int a = 1; a <= 3; ++a) {
    for (int b = 1; b <= 3; ++b) {
      if (r.cell_counts[a - 1][b - 1] == 0 && r.variant == Protocol::Original4) continue;
      cells["A" + std::to_string(a) + "B" + std::to_string(b)] = r.cell_counts[a - 1][b - 1];
    }
  }
  counts["cells"] = std::move(cells);
  j["counts"] = std::move(counts);

  j["key_fraction"] = r.key_fraction;
  j["utilization"] = r.utilization;

  Json verdicts = Json::object();
  verdicts["naive_wigner_violated"] = optional_bool(r.naive_wigner_violated);
  verdicts["modified_wigner_violated"] = optional_bool(r.modified_wigner_violated);
  verdicts["original_protocol_secure"] = optional_bool(r.original_protocol_secure);
  j["verdicts"] = std::move(verdicts);

  j["flags"] = r.flags;
  return detail::dump_json(j) + "\n";
}

}  // namespace wqkd
