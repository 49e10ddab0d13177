#include "wqkd/quantum_model.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "wqkd/errors.hpp"

namespace wqkd {

namespace {

constexpr double kWeightSumTolerance = 1e-12;

double sin_sq(double x) {
  const double s = std::sin(x);
  return s * s;
}

double cos_sq(double x) {
  const double c = std::cos(x);
  return c * c;
}

std::string format_sum(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Angle::Angle(double radians) : radians_(radians) {
  if (!std::isfinite(radians)) {
    throw InputError("angle must be finite, got " + std::to_string(radians));
  }
}

Angle canonical_setting_angle(int index) {
  switch (index) {
    case 1:
      return Angle(-std::numbers::pi / 6.0);
    case 2:
      return Angle(0.0);
    case 3:
      return Angle(std::numbers::pi / 6.0);
    default:
      throw InputError("analyzer setting index must be 1, 2 or 3, got " + std::to_string(index));
  }
}

SettingId::SettingId(Party party, int index) : party_(party), index_(0) {
  canonical_setting_angle(index);  // validates
  index_ = static_cast<std::uint8_t>(index);
}

Angle SettingId::angle() const { return canonical_setting_angle(index_); }

JointOutcome JointOutcome::from_ordinal(std::size_t ordinal) {
  if (ordinal > 3) {
    throw InputError("joint outcome ordinal out of range: " + std::to_string(ordinal));
  }
  return kAllOutcomes[ordinal];
}

AttackDistribution::AttackDistribution(std::vector<AttackAtom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) {
    throw InputError("attack distribution needs at least one atom");
  }
  // Neumaier summation: large discretized grids would otherwise drift past the tolerance.
  double total = 0.0;
  double compensation = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const double w = atoms_[i].weight;
    if (!std::isfinite(w) || w < 0.0) {
      throw InputError("attack atom " + std::to_string(i) + " has invalid weight " +
                       std::to_string(w));
    }
    const double t = total + w;
    compensation += std::abs(total) >= w ? (total - t) + w : (w - t) + total;
    total = t;
  }
  total += compensation;
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    throw InputError("attack weights must sum to 1, got " + format_sum(total));
  }
}

AttackDistribution AttackDistribution::point_mass(Angle phi_a, Angle phi_b) {
  return AttackDistribution({AttackAtom{phi_a, phi_b, 1.0}});
}

double single_photon_prob(Angle phi, Angle alpha, Outcome outcome) {
  const double delta = phi.radians() - alpha.radians();
  return outcome == Outcome::Plus ? cos_sq(delta) : sin_sq(delta);
}

double singlet_joint_prob(Angle alpha_a, Angle alpha_b, JointOutcome outcome) {
  const double delta = alpha_a.radians() - alpha_b.radians();
  // Perfect anticorrelation at equal angles: ++ and -- carry sin^2.
  return outcome.a == outcome.b ? 0.5 * sin_sq(delta) : 0.5 * cos_sq(delta);
}

double product_joint_prob(Angle phi_a, Angle phi_b, Angle alpha_a, Angle alpha_b,
                          JointOutcome outcome) {
  return single_photon_prob(phi_a, alpha_a, outcome.a) *
         single_photon_prob(phi_b, alpha_b, outcome.b);
}

double joint_prob(const SourceModel& source, Angle alpha_a, Angle alpha_b, JointOutcome outcome) {
  if (source.is_singlet()) {
    return singlet_joint_prob(alpha_a, alpha_b, outcome);
  }
  double p = 0.0;
  for (const auto& atom : source.attack().atoms()) {
    p += atom.weight * product_joint_prob(atom.phi_a, atom.phi_b, alpha_a, alpha_b, outcome);
  }
  return p;
}

OutcomeDistribution outcome_distribution(const SourceModel& source, Angle alpha_a, Angle alpha_b) {
  OutcomeDistribution dist{};
  for (const auto outcome : kAllOutcomes) {
    dist[outcome.ordinal()] = joint_prob(source, alpha_a, alpha_b, outcome);
  }
  return dist;
}

}  // namespace wqkd
