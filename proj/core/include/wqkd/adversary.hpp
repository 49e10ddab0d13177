#pragma once

// Eavesdropper models and the attack functionals W_eve and W~_eve.
//
// The integrands are written out directly in terms of Eve's preparation
// angles rather than routed through joint_prob, so they serve as an
// independent check on security_metrics for product-state sources.

#include <string_view>

#include "wqkd/quantum_model.hpp"

namespace wqkd {

// Single-channel intercept-resend: Eve measures Alice's photon in basis
// phi_a, which leaves the pair anticorrelated in that basis.
struct InterceptResendAttack {
  Angle phi_a;

  // (phi_a, phi_a - pi/2)
  AttackAtom induced_pair() const;
};

struct GeneralAttack {
  AttackDistribution distribution;
};

double w_eve_integrand(Angle phi_a, Angle phi_b);
double wtilde_eve_integrand(Angle phi_a, Angle phi_b);

double w_eve(const GeneralAttack& attack);
double wtilde_eve(const GeneralAttack& attack);

double intercept_resend_w_eve(const InterceptResendAttack& attack);

enum class AttackObjective { W, WTilde, InterceptResend };

std::string_view to_string(AttackObjective objective);
// Accepts "w", "wtilde", "ir". Throws InputError otherwise.
AttackObjective parse_attack_objective(std::string_view text);

// The objective as a function of (phi_a, phi_b) in radians. The intercept-resend
// objective depends on phi_a only.
double evaluate_attack_objective(AttackObjective objective, double phi_a, double phi_b);

}  // namespace wqkd
