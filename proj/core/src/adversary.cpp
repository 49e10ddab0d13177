#include "wqkd/adversary.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "wqkd/errors.hpp"

namespace wqkd {

namespace {

constexpr double kSixth = std::numbers::pi / 6.0;

double cos_sq(double x) {
  const double c = std::cos(x);
  return c * c;
}

double sin_sq(double x) {
  const double s = std::sin(x);
  return s * s;
}

double w_raw(double a, double b) {
  const double ca_shift = cos_sq(a + kSixth);
  const double cb_shift = cos_sq(b - kSixth);
  return ca_shift * cos_sq(b) + cos_sq(a) * cb_shift - ca_shift * cb_shift;
}

double wtilde_raw(double a, double b) { return w_raw(a, b) + sin_sq(a) * sin_sq(b); }

double ir_raw(double a) { return w_raw(a, a - std::numbers::pi / 2.0); }

}  // namespace

AttackAtom InterceptResendAttack::induced_pair() const {
  return AttackAtom{phi_a, Angle(phi_a.radians() - std::numbers::pi / 2.0), 1.0};
}

double w_eve_integrand(Angle phi_a, Angle phi_b) { return w_raw(phi_a.radians(), phi_b.radians()); }

double wtilde_eve_integrand(Angle phi_a, Angle phi_b) {
  return wtilde_raw(phi_a.radians(), phi_b.radians());
}

double w_eve(const GeneralAttack& attack) {
  double total = 0.0;
  for (const auto& atom : attack.distribution.atoms()) {
    total += atom.weight * w_eve_integrand(atom.phi_a, atom.phi_b);
  }
  return total;
}

double wtilde_eve(const GeneralAttack& attack) {
  double total = 0.0;
  for (const auto& atom : attack.distribution.atoms()) {
    total += atom.weight * wtilde_eve_integrand(atom.phi_a, atom.phi_b);
  }
  return total;
}

double intercept_resend_w_eve(const InterceptResendAttack& attack) {
  return ir_raw(attack.phi_a.radians());
}

std::string_view to_string(AttackObjective objective) {
  switch (objective) {
    case AttackObjective::W:
      return "w";
    case AttackObjective::WTilde:
      return "wtilde";
    case AttackObjective::InterceptResend:
      return "ir";
  }
  return "?";
}

AttackObjective parse_attack_objective(std::string_view text) {
  if (text == "w") return AttackObjective::W;
  if (text == "wtilde") return AttackObjective::WTilde;
  if (text == "ir") return AttackObjective::InterceptResend;
  throw InputError("unknown objective '" + std::string(text) + "' (expected w, wtilde or ir)");
}

double evaluate_attack_objective(AttackObjective objective, double phi_a, double phi_b) {
  switch (objective) {
    case AttackObjective::W:
      return w_raw(phi_a, phi_b);
    case AttackObjective::WTilde:
      return wtilde_raw(phi_a, phi_b);
    case AttackObjective::InterceptResend:
      return ir_raw(phi_a);
  }
  throw InputError("unknown objective");
}

}  // namespace wqkd
