#pragma once

// Joint detection probabilities for polarization-entangled photon pairs.
//
// Two sources are modelled: the ideal singlet state and an eavesdropper who
// replaces the source with separable pairs |phi_a>|phi_b> drawn from a
// finite mixture. The analyzer rotation is folded into the single-photon
// measurement rule: a photon polarized at phi passing an analyzer at alpha
// fires the + detector with probability cos^2(phi - alpha).

#include <array>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <variant>
#include <vector>

namespace wqkd {

// Polarization or analyzer angle in radians. Always finite; never
// canonicalized, since every probability is pi-periodic in each angle.
class Angle {
 public:
  constexpr Angle() = default;
  explicit Angle(double radians);

  static Angle pi_multiple(double multiple) { return Angle(multiple * std::numbers::pi); }

  double radians() const { return radians_; }

  friend Angle operator+(Angle lhs, Angle rhs) { return Angle(lhs.radians_ + rhs.radians_); }
  friend Angle operator-(Angle lhs, Angle rhs) { return Angle(lhs.radians_ - rhs.radians_); }
  friend Angle operator-(Angle a) { return Angle(-a.radians_); }
  friend bool operator==(Angle, Angle) = default;

 private:
  double radians_ = 0.0;
};

enum class Party : std::uint8_t { Alice, Bob };

// One of the three analyzer positions. Index 1 is -pi/6, 2 is 0 and 3 is
// pi/6 for both parties.
class SettingId {
 public:
  SettingId(Party party, int index);

  static SettingId alice(int index) { return SettingId(Party::Alice, index); }
  static SettingId bob(int index) { return SettingId(Party::Bob, index); }

  Party party() const { return party_; }
  int index() const { return index_; }
  Angle angle() const;

  friend bool operator==(const SettingId&, const SettingId&) = default;

 private:
  Party party_;
  std::uint8_t index_;
};

Angle canonical_setting_angle(int index);

enum class Outcome : std::uint8_t { Plus, Minus };

struct JointOutcome {
  Outcome a = Outcome::Plus;
  Outcome b = Outcome::Plus;

  friend bool operator==(const JointOutcome&, const JointOutcome&) = default;

  // 0..3 in the order ++, +-, -+, --.
  std::size_t ordinal() const {
    return (a == Outcome::Minus ? 2U : 0U) + (b == Outcome::Minus ? 1U : 0U);
  }
  static JointOutcome from_ordinal(std::size_t ordinal);
};

inline constexpr JointOutcome kPlusPlus{Outcome::Plus, Outcome::Plus};
inline constexpr JointOutcome kPlusMinus{Outcome::Plus, Outcome::Minus};
inline constexpr JointOutcome kMinusPlus{Outcome::Minus, Outcome::Plus};
inline constexpr JointOutcome kMinusMinus{Outcome::Minus, Outcome::Minus};
inline constexpr std::array<JointOutcome, 4> kAllOutcomes{kPlusPlus, kPlusMinus, kMinusPlus,
                                                         kMinusMinus};

// Probabilities indexed by JointOutcome::ordinal().
using OutcomeDistribution = std::array<double, 4>;

struct AttackAtom {
  Angle phi_a;
  Angle phi_b;
  double weight = 1.0;
};

// Eve's preparation distribution P(phi_a, phi_b) as a finite point-mass
// mixture. Continuous densities must be discretized by the caller.
class AttackDistribution {
 public:
  // Throws InputError unless non-empty, weights >= 0 and summing to 1 within 1e-12.
  explicit AttackDistribution(std::vector<AttackAtom> atoms);

  static AttackDistribution point_mass(Angle phi_a, Angle phi_b);

  std::span<const AttackAtom> atoms() const { return atoms_; }

 private:
  std::vector<AttackAtom> atoms_;
};

struct SingletSource {};

class SourceModel {
 public:
  static SourceModel singlet() { return SourceModel(SingletSource{}); }
  static SourceModel product_attack(AttackDistribution distribution) {
    return SourceModel(std::move(distribution));
  }

  bool is_singlet() const { return std::holds_alternative<SingletSource>(variant_); }
  // Only valid when !is_singlet().
  const AttackDistribution& attack() const { return std::get<AttackDistribution>(variant_); }

 private:
  explicit SourceModel(std::variant<SingletSource, AttackDistribution> v) : variant_(std::move(v)) {}

  std::variant<SingletSource, AttackDistribution> variant_;
};

// Probability that a photon polarized at phi fires `outcome` behind an analyzer at alpha.
double single_photon_prob(Angle phi, Angle alpha, Outcome outcome);

double singlet_joint_prob(Angle alpha_a, Angle alpha_b, JointOutcome outcome);

double product_joint_prob(Angle phi_a, Angle phi_b, Angle alpha_a, Angle alpha_b,
                          JointOutcome outcome);

double joint_prob(const SourceModel& source, Angle alpha_a, Angle alpha_b, JointOutcome outcome);

OutcomeDistribution outcome_distribution(const SourceModel& source, Angle alpha_a, Angle alpha_b);

}  // namespace wqkd
