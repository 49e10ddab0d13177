#pragma once

#include <optional>
#include <string_view>

#include "wqkd/quantum_model.hpp"

namespace wqkd {

// Original4: Alice {A1, A2}, Bob {B2, B3}; key from (A2, B2).
// Extended9: both parties choose among all three settings; key from the diagonal.
enum class Protocol { Original4, Extended9 };

std::string_view to_string(Protocol protocol);
// Accepts "original4" / "extended9" (case-insensitive). Throws InputError otherwise.
Protocol parse_protocol(std::string_view text);

struct SecurityReport {
  Protocol protocol = Protocol::Original4;
  double w = 0.0;
  double w_tilde = 0.0;
  std::optional<double> w_tilde_prime;  // Extended9 only
  double qber = 0.0;
  bool naive_wigner_violated = false;     // W < 0
  bool modified_wigner_violated = false;  // W~ < 0 (and W~' < 0 for Extended9)
  bool original_protocol_secure = false;  // W < -QBER
};

// p(A1,B2)(++) + p(A2,B3)(++) - p(A1,B3)(++) at the canonical settings.
double wigner_w(const SourceModel& source);

// wigner_w plus the (A2,B2)(--) coincidence probability; >= 0 for every local model.
double modified_wigner(const SourceModel& source);

// Mirror of modified_wigner over (A3,B2), (A2,B1), (A3,B1), sharing the (A2,B2)(--) term.
double mirrored_modified_wigner(const SourceModel& source);

// Correlated-outcome rate at the key setting (A2,B2).
double qber(const SourceModel& source);

// True iff w < -qber - margin. The boundary itself counts as insecure.
bool secure_original(double w, double qber, double margin = 0.0);

SecurityReport security_report(const SourceModel& source, Protocol protocol,
                               double margin = 0.0);

}  // namespace wqkd
