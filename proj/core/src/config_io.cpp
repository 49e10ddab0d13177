#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "json_text.hpp"
#include "wqkd/errors.hpp"
#include "wqkd/io.hpp"

namespace wqkd {

using detail::Json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse_json_text(std::string_view text, const char* what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw InputError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

double angle_from_json(const Json& v, const std::string& where) {
  if (v.is_number()) {
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw InputError(where + " must be finite");
    return d;
  }
  if (v.is_string()) {
    try {
      return parse_angle_text(v.get<std::string>());
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  throw InputError(where + " must be a number or a pi-multiple string");
}

AttackDistribution attack_from_json(const Json& j) {
  if (!j.is_array()) {
    throw InputError("attack must be a JSON array of {phi_a, phi_b, weight}");
  }
  std::vector<AttackAtom> atoms;
  atoms.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& item = j[i];
    const std::string where = "atom " + std::to_string(i);
    if (!item.is_object()) throw InputError(where + " is not an object");
    for (const auto& [key, _] : item.items()) {
      if (key != "phi_a" && key != "phi_b" && key != "weight") {
        throw InputError(where + " has unknown field '" + key + "'");
      }
    }
    if (!item.contains("phi_a") || !item.contains("phi_b") || !item.contains("weight")) {
      throw InputError(where + " needs phi_a, phi_b and weight");
    }
    if (!item["weight"].is_number()) throw InputError(where + ".weight must be a number");
    atoms.push_back(AttackAtom{Angle(angle_from_json(item["phi_a"], where + ".phi_a")),
                               Angle(angle_from_json(item["phi_b"], where + ".phi_b")),
                               item["weight"].get<double>()});
  }
  return AttackDistribution(std::move(atoms));
}

std::vector<double> probabilities_from_json(const Json& v, const char* key) {
  if (!v.is_array()) throw InputError(std::string(key) + " must be an array of numbers");
  std::vector<double> probs;
  for (const auto& p : v) {
    if (!p.is_number()) throw InputError(std::string(key) + " must be an array of numbers");
    probs.push_back(p.get<double>());
  }
  return probs;
}

}  // namespace

double parse_angle_text(std::string_view text) {
  const std::string_view s = trim(text);
  const auto pi_pos = s.find("pi");
  double value = 0.0;
  if (pi_pos == std::string_view::npos) {
    if (!parse_number(s, value)) throw InputError("cannot parse angle '" + std::string(text) + "'");
    return value;
  }

  std::string_view coeff = trim(s.substr(0, pi_pos));
  std::string_view rest = trim(s.substr(pi_pos + 2));
  if (!coeff.empty() && coeff.back() == '*') coeff = trim(coeff.substr(0, coeff.size() - 1));

  double multiple = 1.0;
  if (coeff == "-") {
    multiple = -1.0;
  } else if (!coeff.empty() && coeff != "+" && !parse_number(coeff, multiple)) {
    throw InputError("cannot parse angle '" + std::string(text) + "'");
  }
  if (!rest.empty()) {
    double divisor = 0.0;
    if (rest.front() != '/' || !parse_number(rest.substr(1), divisor) || divisor == 0.0) {
      throw InputError("cannot parse angle '" + std::string(text) + "'");
    }
    multiple /= divisor;
  }
  return multiple * std::numbers::pi;
}

AttackDistribution parse_attack_json(std::string_view text) {
  return attack_from_json(parse_json_text(text, "attack file"));
}

AttackDistribution load_attack_file(const std::filesystem::path& path) {
  try {
    return parse_attack_json(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

SimulationSpec parse_simulation_config(std::string_view text,
                                       const std::filesystem::path& base_dir) {
  const Json j = parse_json_text(text, "simulation config");
  if (!j.is_object()) throw InputError("simulation config must be a JSON object");

  SimulationSpec spec;
  ProtocolConfig& cfg = spec.config;
  bool have_variant = false;
  bool have_n = false;
  bool have_seed = false;
  for (const auto& [key, v] : j.items()) {
    if (key == "variant") {
      if (!v.is_string()) throw InputError("variant must be a string");
      cfg.variant = parse_protocol(v.get<std::string>());
      have_variant = true;
    } else if (key == "n_pairs") {
      if (!v.is_number_unsigned()) throw InputError("n_pairs must be a non-negative integer");
      cfg.n_pairs = v.get<std::uint64_t>();
      have_n = true;
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) throw InputError("seed must be a non-negative integer");
      cfg.seed = v.get<std::uint64_t>();
      have_seed = true;
    } else if (key == "sacrifice_fraction") {
      if (!v.is_number()) throw InputError("sacrifice_fraction must be a number");
      cfg.sacrifice_fraction = v.get<double>();
    } else if (key == "security_margin") {
      if (!v.is_number()) throw InputError("security_margin must be a number");
      cfg.security_margin = v.get<double>();
    } else if (key == "alice_setting_probabilities") {
      cfg.alice_setting_probabilities = probabilities_from_json(v, "alice_setting_probabilities");
    } else if (key == "bob_setting_probabilities") {
      cfg.bob_setting_probabilities = probabilities_from_json(v, "bob_setting_probabilities");
    } else if (key == "source") {
      if (v.is_string()) {
        if (v.get<std::string>() != "singlet") {
          throw InputError("source string must be \"singlet\"");
        }
        spec.source = SourceModel::singlet();
      } else if (v.is_object() && v.size() == 1 && v.contains("attack")) {
        spec.source = SourceModel::product_attack(attack_from_json(v["attack"]));
      } else if (v.is_object() && v.size() == 1 && v.contains("attack_file") &&
                 v["attack_file"].is_string()) {
        std::filesystem::path p = v["attack_file"].get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        spec.source = SourceModel::product_attack(load_attack_file(p));
      } else {
        throw InputError("source must be \"singlet\", {\"attack\": [...]} or {\"attack_file\": path}");
      }
    } else {
      throw InputError("unknown config field '" + key + "'");
    }
  }
  if (!have_variant || !have_n || !have_seed) {
    throw InputError("simulation config needs variant, n_pairs and seed");
  }
  cfg.validate();
  return spec;
}

SimulationSpec load_simulation_config(const std::filesystem::path& path) {
  return parse_simulation_config(read_file(path), path.parent_path());
}

}  // namespace wqkd
