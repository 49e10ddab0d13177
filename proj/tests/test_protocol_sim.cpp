#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "wqkd/errors.hpp"
#include "wqkd/protocol_sim.hpp"

using namespace wqkd;

namespace {

constexpr double kPi = std::numbers::pi;

ProtocolConfig config(Protocol variant, std::uint64_t n, double sacrifice, std::uint64_t seed = 2024) {
  ProtocolConfig c;
  c.variant = variant;
  c.n_pairs = n;
  c.seed = seed;
  c.sacrifice_fraction = sacrifice;
  return c;
}

SourceModel delta(double a, double b) {
  return SourceModel::product_attack(AttackDistribution::point_mass(Angle(a), Angle(b)));
}

}  // namespace

TEST_CASE("draw_outcome never returns zero-probability outcomes") {
  const OutcomeDistribution d{0.0, 0.5, 0.5, 0.0};
  CHECK(draw_outcome(d, 0.0) == kPlusMinus);
  CHECK(draw_outcome(d, 0.4999) == kPlusMinus);
  CHECK(draw_outcome(d, 0.5) == kMinusPlus);
  CHECK(draw_outcome(d, std::nextafter(1.0, 0.0)) == kMinusPlus);
  // Rounding in the cumulative sum must not leak into the final zero-weight bin.
  const OutcomeDistribution skewed{0.1, 0.2, 0.7 - 1e-16, 0.0};
  CHECK(draw_outcome(skewed, std::nextafter(1.0, 0.0)) == kMinusPlus);
}

TEST_CASE("sample_round follows the closed-form distribution") {
  const std::uint64_t n = 100000;
  std::uint64_t pm = 0;
  for (std::uint64_t k = 0; k < n; ++k) {
    CounterRng rng(17, k, RngStream::Outcome);
    const auto o = sample_round(SourceModel::singlet(), SettingId::alice(2), SettingId::bob(2), rng);
    CHECK(o != kPlusPlus);
    CHECK(o != kMinusMinus);
    if (o == kPlusMinus) ++pm;
  }
  CHECK(std::abs(static_cast<double>(pm) / n - 0.5) <= 5 * std::sqrt(0.25 / n));

  for (std::uint64_t k = 0; k < 1000; ++k) {
    CounterRng rng(3, k, RngStream::Outcome);
    CHECK(sample_round(delta(0, 0), SettingId::alice(2), SettingId::bob(2), rng) == kPlusPlus);
  }

  for (std::uint64_t k = 0; k < 100; ++k) {
    CounterRng a(99, k, RngStream::Outcome);
    CounterRng b(99, k, RngStream::Outcome);
    CHECK(sample_round(SourceModel::singlet(), SettingId::alice(1), SettingId::bob(3), a) ==
          sample_round(SourceModel::singlet(), SettingId::alice(1), SettingId::bob(3), b));
  }
}

TEST_CASE("run_session setting cells follow multinomial counts") {
  const auto records = run_session(config(Protocol::Extended9, 90000, 0.0), SourceModel::singlet());
  REQUIRE(records.size() == 90000);
  std::uint64_t cells[3][3] = {};
  for (const auto& r : records) ++cells[r.a_setting.index() - 1][r.b_setting.index() - 1];
  const double slack = 5 * std::sqrt(1e4 * 8.0 / 81.0);
  for (auto& row : cells) {
    for (const auto c : row) CHECK(std::abs(static_cast<double>(c) - 1e4) <= slack);
  }

  const auto orig = run_session(config(Protocol::Original4, 40000, 0.0), SourceModel::singlet());
  std::uint64_t ocells[3][3] = {};
  for (const auto& r : orig) {
    CHECK(r.a_setting.index() != 3);
    CHECK(r.b_setting.index() != 1);
    ++ocells[r.a_setting.index() - 1][r.b_setting.index() - 1];
  }
  const double oslack = 5 * std::sqrt(1e4 * 3.0 / 16.0 * 4.0);
  for (const auto [a, b] : {std::pair{1, 2}, {1, 3}, {2, 2}, {2, 3}}) {
    CHECK(std::abs(static_cast<double>(ocells[a - 1][b - 1]) - 1e4) <= oslack);
  }
}

TEST_CASE("run_session is deterministic across repeats and worker counts") {
  const auto cfg = config(Protocol::Extended9, 20011, 0.3, 5);
  const auto src = delta(0.2, 1.3);
  const auto base = run_session(cfg, src, 1);
  CHECK(base == run_session(cfg, src, 1));
  CHECK(base == run_session(cfg, src, 2));
  CHECK(base == run_session(cfg, src, 8));
  auto other = cfg;
  other.seed = 6;
  CHECK_FALSE(base == run_session(other, src));
}

TEST_CASE("run_session honours non-uniform setting probabilities") {
  auto cfg = config(Protocol::Extended9, 5000, 0.0);
  cfg.alice_setting_probabilities = {0.0, 1.0, 0.0};
  cfg.bob_setting_probabilities = {0.5, 0.0, 0.5};
  for (const auto& r : run_session(cfg, SourceModel::singlet())) {
    CHECK(r.a_setting.index() == 2);
    CHECK(r.b_setting.index() != 2);
  }
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(run_session(config(Protocol::Extended9, 0, 0.0), SourceModel::singlet()),
                  InputError);
  CHECK_THROWS_AS(config(Protocol::Extended9, 10, 1.5).validate(), InputError);
  auto bad = config(Protocol::Original4, 10, 0.0);
  bad.alice_setting_probabilities = {0.2, 0.3, 0.5};
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad.alice_setting_probabilities = {0.2, 0.7};
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad.alice_setting_probabilities = {0.3, 0.7};
  CHECK_NOTHROW(bad.validate());
}

TEST_CASE("estimate_probability") {
  std::vector<RoundRecord> cell;
  for (std::uint64_t k = 0; k < 100; ++k) {
    cell.push_back({k, SettingId::alice(1), SettingId::bob(2), kPlusPlus});
  }
  const auto full = estimate_probability(cell, SettingId::alice(1), SettingId::bob(2), kPlusPlus);
  REQUIRE(full.has_value());
  CHECK(full->value == 1.0);
  CHECK(full->std_error == 0.0);
  CHECK(full->count == 100);
  CHECK_FALSE(estimate_probability(cell, SettingId::alice(3), SettingId::bob(3), kPlusPlus));

  const auto records = run_session(config(Protocol::Extended9, 300000, 0.0), SourceModel::singlet());
  const auto e = estimate_probability(records, SettingId::alice(1), SettingId::bob(3), kPlusPlus);
  REQUIRE(e.has_value());
  CHECK(std::abs(e->value - 0.375) <= 3 * e->std_error);
  CHECK(e->std_error == doctest::Approx(std::sqrt(e->value * (1 - e->value) / e->count)));
}

TEST_CASE("sift: key fraction between 2/9 and 1/3 for the nine-cell protocol") {
  const auto src = SourceModel::singlet();
  const auto cfg0 = config(Protocol::Extended9, 900000, 0.0);
  const auto out0 = sift(run_session(cfg0, src), cfg0, {false});
  CHECK(std::abs(out0.result.key_fraction - 1.0 / 3.0) <= 0.01);
  CHECK_FALSE(out0.result.est_w_tilde.has_value());
  CHECK_FALSE(out0.result.est_qber.has_value());
  CHECK_FALSE(out0.result.modified_wigner_violated.has_value());
  CHECK_FALSE(out0.result.original_protocol_secure.has_value());
  CHECK(out0.result.naive_wigner_violated == true);
  CHECK(out0.result.utilization < 1.0);
  CHECK_FALSE(out0.result.flags.empty());

  const auto cfg1 = config(Protocol::Extended9, 900000, 1.0);
  const auto out1 = sift(run_session(cfg1, src), cfg1, {false});
  const auto& r = out1.result;
  CHECK(std::abs(r.key_fraction - 2.0 / 9.0) <= 0.01);
  CHECK(r.utilization == 1.0);
  REQUIRE(r.est_w_tilde.has_value());
  REQUIRE(r.est_w_tilde_prime.has_value());
  REQUIRE(r.est_qber.has_value());
  CHECK(std::abs(r.est_w_tilde->value + 0.125) <= 0.01);
  CHECK(std::abs(r.est_w_tilde_prime->value + 0.125) <= 0.01);
  CHECK(r.est_qber->value == 0.0);
  CHECK(r.modified_wigner_violated == true);
  CHECK(r.original_protocol_secure == true);
  CHECK(r.flags.empty());
}

TEST_CASE("sift: singlet keys agree bit for bit") {
  const auto cfg = config(Protocol::Extended9, 50000, 0.25);
  const auto out = sift(run_session(cfg, SourceModel::singlet()), cfg, {false});
  CHECK(out.result.alice_key.size() == out.result.key_rounds);
  CHECK(out.result.alice_key == out.result.bob_key);
  CHECK(out.result.key_mismatches == 0);
}

TEST_CASE("sift: accounting identity") {
  for (const auto variant : {Protocol::Original4, Protocol::Extended9}) {
    const auto cfg = config(variant, 40000, 0.4);
    const auto records = run_session(cfg, delta(0.3, 1.9));
    const auto r = sift(records, cfg, {false}).result;
    CHECK(r.key_rounds + r.disclosed_rounds + r.test_rounds == cfg.n_pairs);
    CHECK(r.alice_key.size() == r.bob_key.size());
    CHECK(r.utilization == 1.0);

    std::uint64_t matched22 = 0;
    for (const auto& rec : records) {
      if (rec.a_setting.index() == 2 && rec.b_setting.index() == 2) ++matched22;
    }
    const double rate = static_cast<double>(r.disclosed_rounds) / static_cast<double>(matched22);
    CHECK(std::abs(rate - 0.4) <= 5 * std::sqrt(0.24 / static_cast<double>(matched22)));
    if (variant == Protocol::Original4) {
      CHECK(r.key_rounds + r.disclosed_rounds == matched22);
      CHECK_FALSE(r.est_w_tilde_prime.has_value());
    }
  }
}

TEST_CASE("sift: estimator error shrinks with the standard error") {
  const double exact = 0.6186129227988797;  // W~ at (0.6pi, 0.4pi)
  const auto src = delta(0.6 * kPi, 0.4 * kPi);
  double previous_se = 0.0;
  for (const std::uint64_t n : {10000u, 1000000u}) {
    const auto cfg = config(Protocol::Original4, n, 1.0, 77);
    const auto r = sift(run_session(cfg, src), cfg, {false}).result;
    REQUIRE(r.est_w_tilde.has_value());
    CHECK(std::abs(r.est_w_tilde->value - exact) <= 5 * r.est_w_tilde->std_error);
    if (previous_se > 0.0) {
      CHECK(r.est_w_tilde->std_error == doctest::Approx(previous_se / 10).epsilon(0.15));
    }
    previous_se = r.est_w_tilde->std_error;
  }
}

TEST_CASE("sift: transcript never discloses key rounds") {
  const auto cfg = config(Protocol::Extended9, 3000, 0.5);
  const auto records = run_session(cfg, SourceModel::singlet());
  const auto out = sift(records, cfg);
  std::set<std::uint64_t> requested;
  std::uint64_t announces = 0;
  std::uint64_t disclosures = 0;
  for (const auto& m : out.transcript) {
    if (m.kind == MessageKind::SettingAnnounce) {
      ++announces;
      CHECK(std::holds_alternative<SettingId>(m.payload));
    } else if (m.kind == MessageKind::DisclosureRequest) {
      requested.insert(m.round);
    } else {
      ++disclosures;
      CHECK(requested.count(m.round) == 1);
      CHECK(std::get<JointOutcome>(m.payload) == records[m.round].outcome);
      const auto& rec = records[m.round];
      const bool matched = rec.a_setting.index() == rec.b_setting.index();
      CHECK((!matched || (rec.a_setting.index() == 2 && is_sacrificed(cfg, m.round))));
    }
  }
  CHECK(announces == 2 * cfg.n_pairs);
  CHECK(disclosures == out.result.disclosed_rounds + out.result.test_rounds);
}

TEST_CASE("sift rejects records that do not match the config") {
  const auto cfg = config(Protocol::Original4, 100, 0.0);
  auto records = run_session(cfg, SourceModel::singlet());
  auto shorter = cfg;
  shorter.n_pairs = 99;
  CHECK_THROWS_AS(sift(records, shorter), InputError);
  records[5].a_setting = SettingId::alice(3);
  CHECK_THROWS_AS(sift(records, cfg), InputError);
}

TEST_CASE("sift output is deterministic") {
  const auto cfg = config(Protocol::Extended9, 10000, 0.5);
  const auto a = sift(run_session(cfg, SourceModel::singlet(), 1), cfg).result;
  const auto b = sift(run_session(cfg, SourceModel::singlet(), 3), cfg).result;
  CHECK(a.alice_key == b.alice_key);
  CHECK(a.est_w->value == b.est_w->value);
  CHECK(a.est_w_tilde->value == b.est_w_tilde->value);
}
