#pragma once

// Seeded Monte Carlo sessions of the Wigner-test Ekert protocol.
//
// A session draws each party's analyzer setting independently per round,
// samples the joint detection outcome from the closed-form probabilities,
// and then sifts: matched settings become key candidates, a seeded subset
// of the (A2, B2) rounds is disclosed to estimate W~ and the QBER, and all
// mismatched-setting rounds feed the Wigner estimators.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wqkd/counter_rng.hpp"
#include "wqkd/quantum_model.hpp"
#include "wqkd/security_metrics.hpp"

namespace wqkd {

struct ProtocolConfig {
  Protocol variant = Protocol::Extended9;
  std::uint64_t n_pairs = 0;
  std::uint64_t seed = 0;
  // Fraction of matched (A2, B2) rounds whose outcomes are disclosed.
  double sacrifice_fraction = 0.0;
  // One entry per menu setting (ascending index); empty means uniform.
  std::vector<double> alice_setting_probabilities;
  std::vector<double> bob_setting_probabilities;
  // Margin passed to secure_original for the empirical verdict.
  double security_margin = 0.0;

  // Throws InputError on any violated invariant.
  void validate() const;
};

// Setting indices available to each party under a protocol variant.
std::vector<int> setting_menu(Protocol variant, Party party);

struct RoundRecord {
  std::uint64_t round = 0;
  SettingId a_setting = SettingId::alice(2);
  SettingId b_setting = SettingId::bob(2);
  JointOutcome outcome;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

// Inverse-CDF draw over ++, +-, -+, --. Zero-probability outcomes are never returned.
JointOutcome draw_outcome(const OutcomeDistribution& distribution, double u);

JointOutcome sample_round(const SourceModel& source, SettingId a_setting, SettingId b_setting,
                          CounterRng& rng);

// n_pairs records, independent of `workers`. Throws InputError on an invalid config.
std::vector<RoundRecord> run_session(const ProtocolConfig& config, const SourceModel& source,
                                     unsigned workers = 1);

// Whether a matched (A2, B2) round is disclosed for estimation.
bool is_sacrificed(const ProtocolConfig& config, std::uint64_t round);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t count = 0;
};

// Binomial estimate hits / count; nullopt when count == 0.
std::optional<Estimate> estimate_from_counts(std::uint64_t hits, std::uint64_t count);

// Frequency of `outcome` among records in the (a_setting, b_setting) cell.
std::optional<Estimate> estimate_probability(std::span<const RoundRecord> records,
                                             SettingId a_setting, SettingId b_setting,
                                             JointOutcome outcome);

// A signed sum of independent cell estimates.
struct ParameterEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

enum class MessageKind { SettingAnnounce, DisclosureRequest, Disclosure };

std::string_view to_string(MessageKind kind);

struct SiftMessage {
  MessageKind kind = MessageKind::SettingAnnounce;
  std::uint64_t round = 0;
  // SettingAnnounce: SettingId; DisclosureRequest: none; Disclosure: JointOutcome.
  std::variant<std::monostate, SettingId, JointOutcome> payload;
};

struct SiftingResult {
  Protocol variant = Protocol::Extended9;
  std::uint64_t n_pairs = 0;
  double sacrifice_fraction = 0.0;

  // One bit per key round: Alice + -> 1, Bob - -> 1.
  std::vector<std::uint8_t> alice_key;
  std::vector<std::uint8_t> bob_key;

  std::optional<ParameterEstimate> est_w;
  std::optional<ParameterEstimate> est_w_tilde;
  std::optional<ParameterEstimate> est_w_tilde_prime;  // Extended9 only
  std::optional<ParameterEstimate> est_qber;

  std::uint64_t key_rounds = 0;
  std::uint64_t disclosed_rounds = 0;
  std::uint64_t test_rounds = 0;
  std::uint64_t key_mismatches = 0;
  // Rounds per (alice index, bob index) cell, indices 1..3 stored at [i-1][j-1].
  std::uint64_t cell_counts[3][3] = {};

  double key_fraction = 0.0;
  double utilization = 0.0;

  // Withheld (nullopt) when a required estimator is unavailable.
  std::optional<bool> naive_wigner_violated;
  std::optional<bool> modified_wigner_violated;
  std::optional<bool> original_protocol_secure;

  std::vector<std::string> flags;
};

struct SiftOptions {
  bool record_transcript = true;
};

struct SiftOutput {
  SiftingResult result;
  std::vector<SiftMessage> transcript;
};

// Throws InputError if the records do not match the config (count or setting menus).
SiftOutput sift(std::span<const RoundRecord> records, const ProtocolConfig& config,
                const SiftOptions& options = {});

}  // namespace wqkd
