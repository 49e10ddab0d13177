#pragma once

// File formats: attack files, simulation configs, JSON reports, session
// record CSV and sifting transcripts. All floating-point output uses 17
// significant digits so that values round-trip exactly.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "wqkd/optimizer.hpp"
#include "wqkd/protocol_sim.hpp"
#include "wqkd/quantum_model.hpp"
#include "wqkd/security_metrics.hpp"

namespace wqkd {

// Radians, or a multiple of pi: "0.6pi", "-pi/6", "pi", "0.25*pi". Throws InputError.
double parse_angle_text(std::string_view text);

// JSON array of {"phi_a", "phi_b", "weight"}; angles as numbers (radians)
// or pi-multiple strings. Throws InputError when malformed.
AttackDistribution parse_attack_json(std::string_view text);
// Throws IoError when unreadable, InputError when malformed.
AttackDistribution load_attack_file(const std::filesystem::path& path);

// Source given as "singlet", an inline atom array, or an attack file path.
struct SimulationSpec {
  ProtocolConfig config;
  SourceModel source = SourceModel::singlet();
};

// Relative attack_file paths resolve against base_dir.
SimulationSpec parse_simulation_config(std::string_view text,
                                       const std::filesystem::path& base_dir = {});
SimulationSpec load_simulation_config(const std::filesystem::path& path);

std::string format_double(double value);

std::string to_json(const SecurityReport& report);
std::string to_json(const OptimizationResult& result, AttackObjective objective);
std::string grid_minimum_json(const GridScanResult& scan, AttackObjective objective);
std::string to_json(const SiftingResult& result);

// CSV `round,a_setting,b_setting,outcome`; settings as A1..A3 / B1..B3,
// outcomes as PP, PM, MP, MM.
void write_records_csv(std::ostream& out, std::span<const RoundRecord> records);
// One JSON object per line with fields kind, round, payload.
void write_transcript_jsonl(std::ostream& out, std::span<const SiftMessage> transcript);

std::string setting_label(SettingId setting);
std::string outcome_label(JointOutcome outcome);

}  // namespace wqkd
