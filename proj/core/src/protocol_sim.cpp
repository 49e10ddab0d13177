#include "wqkd/protocol_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <thread>

#include "wqkd/errors.hpp"

namespace wqkd {

namespace {

constexpr double kProbabilitySumTolerance = 1e-12;

std::vector<double> effective_probabilities(const std::vector<double>& given, std::size_t menu_size) {
  if (given.empty()) {
    return std::vector<double>(menu_size, 1.0 / static_cast<double>(menu_size));
  }
  return given;
}

void validate_probabilities(const std::vector<double>& probs, std::size_t menu_size,
                            const char* who) {
  if (probs.empty()) return;
  if (probs.size() != menu_size) {
    throw InputError(std::string(who) + " setting probabilities need " + std::to_string(menu_size) +
                     " entries, got " + std::to_string(probs.size()));
  }
  double total = 0.0;
  for (const double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw InputError(std::string(who) + " setting probabilities must be non-negative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kProbabilitySumTolerance) {
    throw InputError(std::string(who) + " setting probabilities must sum to 1, got " +
                     std::to_string(total));
  }
}

// Draws a menu index from a cumulative table; zero-weight entries are skipped.
int draw_setting(const std::vector<int>& menu, const std::vector<double>& probs, double u) {
  double cumulative = 0.0;
  int last_positive = menu.front();
  for (std::size_t k = 0; k < menu.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    cumulative += probs[k];
    last_positive = menu[k];
    if (u < cumulative) return menu[k];
  }
  return last_positive;
}

bool in_menu(const std::vector<int>& menu, int index) {
  return std::find(menu.begin(), menu.end(), index) != menu.end();
}

using OutcomeTable = std::array<std::array<OutcomeDistribution, 3>, 3>;

OutcomeTable tabulate(const SourceModel& source) {
  OutcomeTable table{};
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      table[i - 1][j - 1] =
          outcome_distribution(source, canonical_setting_angle(i), canonical_setting_angle(j));
    }
  }
  return table;
}

struct CellTally {
  std::array<std::uint64_t, 4> outcomes{};
  std::uint64_t total = 0;
};

std::optional<ParameterEstimate> combine(
    std::initializer_list<std::pair<double, std::optional<Estimate>>> terms) {
  ParameterEstimate sum;
  double variance = 0.0;
  for (const auto& [sign, estimate] : terms) {
    if (!estimate) return std::nullopt;
    sum.value += sign * estimate->value;
    variance += estimate->std_error * estimate->std_error;
  }
  sum.std_error = std::sqrt(variance);
  return sum;
}

}  // namespace

void ProtocolConfig::validate() const {
  if (n_pairs == 0) {
    throw InputError("n_pairs must be positive");
  }
  if (!std::isfinite(sacrifice_fraction) || sacrifice_fraction < 0.0 || sacrifice_fraction > 1.0) {
    throw InputError("sacrifice_fraction must lie in [0, 1]");
  }
  if (!std::isfinite(security_margin) || security_margin < 0.0) {
    throw InputError("security_margin must be finite and non-negative");
  }
  validate_probabilities(alice_setting_probabilities, setting_menu(variant, Party::Alice).size(),
                         "alice");
  validate_probabilities(bob_setting_probabilities, setting_menu(variant, Party::Bob).size(),
                         "bob");
}

std::vector<int> setting_menu(Protocol variant, Party party) {
  if (variant == Protocol::Extended9) return {1, 2, 3};
  return party == Party::Alice ? std::vector<int>{1, 2} : std::vector<int>{2, 3};
}

JointOutcome draw_outcome(const OutcomeDistribution& distribution, double u) {
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < distribution.size(); ++k) {
    if (distribution[k] <= 0.0) continue;
    cumulative += distribution[k];
    last_positive = k;
    if (u < cumulative) return JointOutcome::from_ordinal(k);
  }
  return JointOutcome::from_ordinal(last_positive);
}

JointOutcome sample_round(const SourceModel& source, SettingId a_setting, SettingId b_setting,
                          CounterRng& rng) {
  return draw_outcome(outcome_distribution(source, a_setting.angle(), b_setting.angle()),
                      rng.uniform());
}

std::vector<RoundRecord> run_session(const ProtocolConfig& config, const SourceModel& source,
                                     unsigned workers) {
  config.validate();
  const auto alice_menu = setting_menu(config.variant, Party::Alice);
  const auto bob_menu = setting_menu(config.variant, Party::Bob);
  const auto alice_probs = effective_probabilities(config.alice_setting_probabilities, alice_menu.size());
  const auto bob_probs = effective_probabilities(config.bob_setting_probabilities, bob_menu.size());
  const OutcomeTable table = tabulate(source);

  std::vector<RoundRecord> records(config.n_pairs);
  auto fill = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t r = begin; r < end; ++r) {
      CounterRng alice_rng(config.seed, r, RngStream::AliceSetting);
      CounterRng bob_rng(config.seed, r, RngStream::BobSetting);
      CounterRng outcome_rng(config.seed, r, RngStream::Outcome);
      const int a = draw_setting(alice_menu, alice_probs, alice_rng.uniform());
      const int b = draw_setting(bob_menu, bob_probs, bob_rng.uniform());
      records[r] = RoundRecord{r, SettingId::alice(a), SettingId::bob(b),
                               draw_outcome(table[a - 1][b - 1], outcome_rng.uniform())};
    }
  };

  const std::uint64_t n_workers = std::clamp<std::uint64_t>(workers, 1, config.n_pairs);
  if (n_workers == 1) {
    fill(0, config.n_pairs);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    const std::uint64_t chunk = (config.n_pairs + n_workers - 1) / n_workers;
    for (std::uint64_t w = 0; w < n_workers; ++w) {
      const std::uint64_t begin = w * chunk;
      const std::uint64_t end = std::min(config.n_pairs, begin + chunk);
      if (begin < end) pool.emplace_back(fill, begin, end);
    }
  }
  return records;
}

bool is_sacrificed(const ProtocolConfig& config, std::uint64_t round) {
  if (config.sacrifice_fraction <= 0.0) return false;
  if (config.sacrifice_fraction >= 1.0) return true;
  CounterRng rng(config.seed, round, RngStream::Sacrifice);
  return rng.uniform() < config.sacrifice_fraction;
}

std::optional<Estimate> estimate_from_counts(std::uint64_t hits, std::uint64_t count) {
  if (count == 0) return std::nullopt;
  if (hits > count) {
    throw InputError("estimate hits exceed cell count");
  }
  const double n = static_cast<double>(count);
  const double p = static_cast<double>(hits) / n;
  return Estimate{p, std::sqrt(p * (1.0 - p) / n), count};
}

std::optional<Estimate> estimate_probability(std::span<const RoundRecord> records,
                                             SettingId a_setting, SettingId b_setting,
                                             JointOutcome outcome) {
  std::uint64_t hits = 0;
  std::uint64_t count = 0;
  for (const auto& rec : records) {
    if (rec.a_setting.index() != a_setting.index() || rec.b_setting.index() != b_setting.index()) {
      continue;
    }
    ++count;
    if (rec.outcome == outcome) ++hits;
  }
  return estimate_from_counts(hits, count);
}

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::SettingAnnounce:
      return "SettingAnnounce";
    case MessageKind::DisclosureRequest:
      return "DisclosureRequest";
    case MessageKind::Disclosure:
      return "Disclosure";
  }
  return "?";
}

SiftOutput sift(std::span<const RoundRecord> records, const ProtocolConfig& config,
                const SiftOptions& options) {
  config.validate();
  if (records.size() != config.n_pairs) {
    throw InputError("expected " + std::to_string(config.n_pairs) + " records, got " +
                     std::to_string(records.size()));
  }
  const auto alice_menu = setting_menu(config.variant, Party::Alice);
  const auto bob_menu = setting_menu(config.variant, Party::Bob);

  SiftOutput out;
  SiftingResult& res = out.result;
  res.variant = config.variant;
  res.n_pairs = config.n_pairs;
  res.sacrifice_fraction = config.sacrifice_fraction;

  CellTally cells[3][3];
  CellTally disclosed;
  // Positions of records whose outcomes go public, in round order.
  std::vector<std::size_t> public_rounds;

  for (std::size_t pos = 0; pos < records.size(); ++pos) {
    const RoundRecord& rec = records[pos];
    const int a = rec.a_setting.index();
    const int b = rec.b_setting.index();
    if (rec.a_setting.party() != Party::Alice || rec.b_setting.party() != Party::Bob ||
        !in_menu(alice_menu, a) || !in_menu(bob_menu, b)) {
      throw InputError("record " + std::to_string(rec.round) +
                       " uses a setting outside the protocol menu");
    }
    CellTally& cell = cells[a - 1][b - 1];
    ++cell.total;
    ++cell.outcomes[rec.outcome.ordinal()];

    if (a != b) {
      ++res.test_rounds;
      public_rounds.push_back(pos);
      continue;
    }
    if (a == 2 && is_sacrificed(config, rec.round)) {
      ++res.disclosed_rounds;
      ++disclosed.total;
      ++disclosed.outcomes[rec.outcome.ordinal()];
      public_rounds.push_back(pos);
      continue;
    }
    ++res.key_rounds;
    const std::uint8_t alice_bit = rec.outcome.a == Outcome::Plus ? 1 : 0;
    const std::uint8_t bob_bit = rec.outcome.b == Outcome::Minus ? 1 : 0;
    res.alice_key.push_back(alice_bit);
    res.bob_key.push_back(bob_bit);
    if (alice_bit != bob_bit) ++res.key_mismatches;
  }

  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) res.cell_counts[i][j] = cells[i][j].total;
  }

  auto cell_pp = [&](int a, int b) {
    const CellTally& c = cells[a - 1][b - 1];
    return estimate_from_counts(c.outcomes[kPlusPlus.ordinal()], c.total);
  };
  const auto disclosed_mm = estimate_from_counts(disclosed.outcomes[kMinusMinus.ordinal()], disclosed.total);

  res.est_w = combine({{1.0, cell_pp(1, 2)}, {1.0, cell_pp(2, 3)}, {-1.0, cell_pp(1, 3)}});
  res.est_w_tilde = combine(
      {{1.0, cell_pp(1, 2)}, {1.0, cell_pp(2, 3)}, {1.0, disclosed_mm}, {-1.0, cell_pp(1, 3)}});
  if (config.variant == Protocol::Extended9) {
    res.est_w_tilde_prime = combine(
        {{1.0, cell_pp(3, 2)}, {1.0, cell_pp(2, 1)}, {1.0, disclosed_mm}, {-1.0, cell_pp(3, 1)}});
  }
  if (const auto q = estimate_from_counts(
          disclosed.outcomes[kPlusPlus.ordinal()] + disclosed.outcomes[kMinusMinus.ordinal()],
          disclosed.total)) {
    res.est_qber = ParameterEstimate{q->value, q->std_error};
  }

  if (!res.est_w) res.flags.emplace_back("w unavailable: empty test cell");
  if (!res.est_w_tilde) {
    res.flags.emplace_back(disclosed.total == 0
                               ? "w_tilde unavailable: no disclosed (A2,B2) rounds"
                               : "w_tilde unavailable: empty test cell");
  }
  if (config.variant == Protocol::Extended9 && !res.est_w_tilde_prime) {
    res.flags.emplace_back(disclosed.total == 0
                               ? "w_tilde_prime unavailable: no disclosed (A2,B2) rounds"
                               : "w_tilde_prime unavailable: empty test cell");
  }
  if (!res.est_qber) res.flags.emplace_back("qber unavailable: no disclosed (A2,B2) rounds");

  // Test rounds count toward utilization only if an available estimator consumes their cell.
  std::uint64_t used_test_rounds = 0;
  auto count_cells = [&](std::initializer_list<std::pair<int, int>> used) {
    std::uint64_t n = 0;
    for (const auto& [a, b] : used) n += cells[a - 1][b - 1].total;
    return n;
  };
  if (res.est_w || res.est_w_tilde) used_test_rounds += count_cells({{1, 2}, {2, 3}, {1, 3}});
  if (res.est_w_tilde_prime) used_test_rounds += count_cells({{3, 2}, {2, 1}, {3, 1}});

  const double n = static_cast<double>(config.n_pairs);
  res.key_fraction = static_cast<double>(res.key_rounds) / n;
  res.utilization =
      static_cast<double>(res.key_rounds + res.disclosed_rounds + used_test_rounds) / n;
  if (used_test_rounds < res.test_rounds) {
    res.flags.emplace_back("utilization: " + std::to_string(res.test_rounds - used_test_rounds) +
                           " test rounds feed no available estimator");
  }

  if (res.est_w) res.naive_wigner_violated = res.est_w->value < 0.0;
  if (res.est_w_tilde && (config.variant == Protocol::Original4 || res.est_w_tilde_prime)) {
    bool violated = res.est_w_tilde->value < 0.0;
    if (res.est_w_tilde_prime) violated = violated && res.est_w_tilde_prime->value < 0.0;
    res.modified_wigner_violated = violated;
  }
  if (res.est_w && res.est_qber) {
    res.original_protocol_secure =
        secure_original(res.est_w->value, res.est_qber->value, config.security_margin);
  }

  if (options.record_transcript) {
    auto& t = out.transcript;
    t.reserve(2 * records.size() + 2 * public_rounds.size());
    for (const auto& rec : records) {
      t.push_back({MessageKind::SettingAnnounce, rec.round, rec.a_setting});
      t.push_back({MessageKind::SettingAnnounce, rec.round, rec.b_setting});
    }
    for (const auto pos : public_rounds) {
      t.push_back({MessageKind::DisclosureRequest, records[pos].round, std::monostate{}});
    }
    for (const auto pos : public_rounds) {
      t.push_back({MessageKind::Disclosure, records[pos].round, records[pos].outcome});
    }
  }
  return out;
}

}  // namespace wqkd
