#include "wqkd/security_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "wqkd/errors.hpp"

namespace wqkd {

namespace {

double pp(const SourceModel& source, int alice_index, int bob_index) {
  return joint_prob(source, canonical_setting_angle(alice_index), canonical_setting_angle(bob_index),
                    kPlusPlus);
}

double key_setting_prob(const SourceModel& source, JointOutcome outcome) {
  const Angle zero = canonical_setting_angle(2);
  return joint_prob(source, zero, zero, outcome);
}

}  // namespace

std::string_view to_string(Protocol protocol) {
  return protocol == Protocol::Original4 ? "original4" : "extended9";
}

Protocol parse_protocol(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "original4") return Protocol::Original4;
  if (lower == "extended9") return Protocol::Extended9;
  throw InputError("unknown protocol '" + std::string(text) + "' (expected original4 or extended9)");
}

double wigner_w(const SourceModel& source) {
  return pp(source, 1, 2) + pp(source, 2, 3) - pp(source, 1, 3);
}

double modified_wigner(const SourceModel& source) {
  return wigner_w(source) + key_setting_prob(source, kMinusMinus);
}

double mirrored_modified_wigner(const SourceModel& source) {
  return pp(source, 3, 2) + pp(source, 2, 1) + key_setting_prob(source, kMinusMinus) -
         pp(source, 3, 1);
}

double qber(const SourceModel& source) {
  return key_setting_prob(source, kMinusMinus) + key_setting_prob(source, kPlusPlus);
}

bool secure_original(double w, double qber, double margin) {
  if (!std::isfinite(margin) || margin < 0.0) {
    throw InputError("security margin must be finite and non-negative");
  }
  return w < -qber - margin;
}

SecurityReport security_report(const SourceModel& source, Protocol protocol, double margin) {
  SecurityReport report;
  report.protocol = protocol;
  report.w = wigner_w(source);
  report.w_tilde = modified_wigner(source);
  report.qber = qber(source);
  report.naive_wigner_violated = report.w < 0.0;
  report.modified_wigner_violated = report.w_tilde < 0.0;
  if (protocol == Protocol::Extended9) {
    report.w_tilde_prime = mirrored_modified_wigner(source);
    report.modified_wigner_violated = report.modified_wigner_violated && *report.w_tilde_prime < 0.0;
  }
  report.original_protocol_secure = secure_original(report.w, report.qber, margin);
  return report;
}

}  // namespace wqkd
