#include <ostream>
#include <string>
#include <variant>

#include "json_text.hpp"
#include "wqkd/errors.hpp"
#include "wqkd/io.hpp"

namespace wqkd {

std::string setting_label(SettingId setting) {
  return (setting.party() == Party::Alice ? "A" : "B") + std::to_string(setting.index());
}

std::string outcome_label(JointOutcome outcome) {
  std::string s;
  s += outcome.a == Outcome::Plus ? 'P' : 'M';
  s += outcome.b == Outcome::Plus ? 'P' : 'M';
  return s;
}

void write_records_csv(std::ostream& out, std::span<const RoundRecord> records) {
  out << "round,a_setting,b_setting,outcome\n";
  for (const auto& rec : records) {
    out << rec.round << ',' << setting_label(rec.a_setting) << ',' << setting_label(rec.b_setting)
        << ',' << outcome_label(rec.outcome) << '\n';
  }
  if (!out) throw IoError("failed writing session records");
}

void write_transcript_jsonl(std::ostream& out, std::span<const SiftMessage> transcript) {
  for (const auto& msg : transcript) {
    detail::Json j = detail::Json::object();
    j["kind"] = std::string(to_string(msg.kind));
    j["round"] = msg.round;
    if (const auto* s = std::get_if<SettingId>(&msg.payload)) {
      j["payload"] = setting_label(*s);
    } else if (const auto* o = std::get_if<JointOutcome>(&msg.payload)) {
      j["payload"] = outcome_label(*o);
    } else {
      j["payload"] = nullptr;
    }
    out << detail::dump_json(j, -1) << '\n';
  }
  if (!out) throw IoError("failed writing transcript");
}

}  // namespace wqkd
