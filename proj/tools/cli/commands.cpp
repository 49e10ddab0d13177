#include "cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wqkd/adversary.hpp"
#include "wqkd/errors.hpp"
#include "wqkd/io.hpp"
#include "wqkd/optimizer.hpp"
#include "wqkd/protocol_sim.hpp"
#include "wqkd/security_metrics.hpp"
#include "wqkd/version.hpp"

namespace wqkd::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path manifest_path(const fs::path& output) {
  return fs::path(output.string() + ".manifest.json");
}

// Records everything needed to rerun the command that produced `outputs`.
void write_manifest(const fs::path& primary_output, const std::string& command,
                    const std::vector<std::string>& args, Json parameters,
                    std::optional<std::uint64_t> seed, const std::vector<fs::path>& outputs) {
  Json m = Json::object();
  m["tool"] = "wqkd";
  m["version"] = kVersion;
  m["command"] = command;
  m["argv"] = args;
  m["parameters"] = std::move(parameters);
  m["seed"] = seed ? Json(*seed) : Json(nullptr);
  Json paths = Json::array();
  for (const auto& p : outputs) paths.push_back(p.string());
  m["outputs"] = std::move(paths);
  write_text(manifest_path(primary_output), m.dump(2) + "\n");
}

struct AnalyzeArgs {
  std::string source;
  std::string attack;
  std::string protocol = "original4";
  double margin = 0.0;
};

struct ScanArgs {
  std::string objective;
  std::size_t resolution = 720;
  std::string output;
  unsigned workers = 1;
};

struct OptimizeArgs {
  std::string objective;
  std::size_t resolution = 720;
  double tolerance = 1e-10;
  unsigned workers = 1;
  std::string output;
};

struct SimulateArgs {
  std::string config;
  std::string output = "simulation.json";
  std::string records;
  std::string transcript;
  unsigned workers = 1;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  if (a.source.empty() == a.attack.empty()) {
    throw InputError("analyze needs exactly one of --source singlet or --attack FILE");
  }
  if (!a.source.empty() && a.source != "singlet") {
    throw InputError("--source accepts only 'singlet'; use --attack for attack files");
  }
  const SourceModel source = a.source.empty()
                                 ? SourceModel::product_attack(load_attack_file(a.attack))
                                 : SourceModel::singlet();
  out << to_json(security_report(source, parse_protocol(a.protocol), a.margin));
  return kExitOk;
}

int cmd_scan(const ScanArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const AttackObjective objective = parse_attack_objective(a.objective);
  const fs::path path = a.output.empty() ? fs::path("scan_" + a.objective + "_" +
                                                    std::to_string(a.resolution) + ".csv")
                                         : fs::path(a.output);
  const GridScanResult scan = grid_scan(make_objective(objective), a.resolution, a.workers);
  {
    auto file = open_output(path);
    write_scan_csv(file, scan.grid);
  }
  Json params = Json::object();
  params["objective"] = a.objective;
  params["resolution"] = a.resolution;
  write_manifest(path, "scan", args, std::move(params), std::nullopt, {path});
  out << grid_minimum_json(scan, objective);
  return kExitOk;
}

int cmd_optimize(const OptimizeArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const AttackObjective objective = parse_attack_objective(a.objective);
  SearchOptions options;
  options.resolution = a.resolution;
  options.tolerance = a.tolerance;
  options.workers = a.workers;
  const std::string json = to_json(find_min(objective, options), objective);
  if (!a.output.empty()) {
    write_text(a.output, json);
    Json params = Json::object();
    params["objective"] = a.objective;
    params["resolution"] = a.resolution;
    params["tolerance"] = format_double(a.tolerance);
    write_manifest(a.output, "optimize", args, std::move(params), std::nullopt, {a.output});
  }
  out << json;
  return kExitOk;
}

int cmd_simulate(const SimulateArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const std::string config_text = read_text(a.config);
  const SimulationSpec spec =
      parse_simulation_config(config_text, fs::path(a.config).parent_path());

  const auto records = run_session(spec.config, spec.source, a.workers);
  SiftOptions sift_options;
  sift_options.record_transcript = !a.transcript.empty();
  const SiftOutput sifted = sift(records, spec.config, sift_options);

  std::vector<fs::path> outputs{a.output};
  const std::string json = to_json(sifted.result);
  write_text(a.output, json);
  if (!a.records.empty()) {
    auto file = open_output(a.records);
    write_records_csv(file, records);
    outputs.emplace_back(a.records);
  }
  if (!a.transcript.empty()) {
    auto file = open_output(a.transcript);
    write_transcript_jsonl(file, sifted.transcript);
    outputs.emplace_back(a.transcript);
  }

  Json params = Json::object();
  params["config_path"] = a.config;
  params["config"] = config_text;
  write_manifest(a.output, "simulate", args, std::move(params), spec.config.seed, outputs);
  out << json;
  return kExitOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
             int replay_depth);

int cmd_replay(const std::string& manifest, std::ostream& out, std::ostream& err,
               int replay_depth) {
  if (replay_depth > 0) throw InputError("a manifest cannot replay another manifest");
  Json m;
  try {
    m = Json::parse(read_text(manifest));
  } catch (const Json::exception& e) {
    throw InputError(manifest + " is not a valid manifest: " + e.what());
  }
  if (!m.is_object() || !m.contains("argv") || !m["argv"].is_array()) {
    throw InputError(manifest + " has no argv array");
  }
  std::vector<std::string> argv;
  for (const auto& item : m["argv"]) {
    if (!item.is_string()) throw InputError(manifest + ": argv entries must be strings");
    argv.push_back(item.get<std::string>());
  }
  return dispatch(argv, out, err, replay_depth + 1);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
             int replay_depth) {
  CLI::App app{"Security workbench for the Wigner-test Ekert QKD protocol", "wqkd"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "Closed-form security report for a source");
  auto* source_opt = analyze->add_option("--source", analyze_args.source, "Built-in source (singlet)");
  auto* attack_opt = analyze->add_option("--attack", analyze_args.attack, "Attack file (JSON atoms)");
  source_opt->excludes(attack_opt);
  analyze->add_option("--protocol", analyze_args.protocol, "original4 or extended9")
      ->capture_default_str();
  analyze->add_option("--margin", analyze_args.margin, "Margin for the W < -QBER criterion")
      ->capture_default_str();

  ScanArgs scan_args;
  auto* scan = app.add_subcommand("scan", "Grid scan of an attack objective over [0,pi)^2");
  scan->add_option("--objective", scan_args.objective, "w, wtilde or ir")->required();
  scan->add_option("--resolution", scan_args.resolution, "Nodes per axis")->capture_default_str();
  scan->add_option("--output", scan_args.output, "CSV path (default scan_<objective>_<resolution>.csv)");
  scan->add_option("--workers", scan_args.workers, "Worker threads")->capture_default_str();

  OptimizeArgs opt_args;
  auto* optimize = app.add_subcommand("optimize", "Global minimum of an attack objective");
  optimize->add_option("--objective", opt_args.objective, "w, wtilde or ir")->required();
  optimize->add_option("--resolution", opt_args.resolution, "Grid nodes per axis")->capture_default_str();
  optimize->add_option("--tolerance", opt_args.tolerance, "Simplex radius tolerance")
      ->capture_default_str();
  optimize->add_option("--workers", opt_args.workers, "Worker threads")->capture_default_str();
  optimize->add_option("--output", opt_args.output, "Also write the JSON result here");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo protocol session");
  simulate->add_option("--config", sim_args.config, "Simulation config (JSON)")->required();
  simulate->add_option("--output", sim_args.output, "Result JSON path")->capture_default_str();
  simulate->add_option("--records", sim_args.records, "Optional session record CSV");
  simulate->add_option("--transcript", sim_args.transcript, "Optional sifting transcript (JSON lines)");
  simulate->add_option("--workers", sim_args.workers, "Worker threads")->capture_default_str();

  std::string manifest;
  auto* replay = app.add_subcommand("replay", "Re-execute the command recorded in a manifest");
  replay->add_option("--manifest", manifest, "Manifest file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (analyze->parsed()) return cmd_analyze(analyze_args, out);
  if (scan->parsed()) return cmd_scan(scan_args, args, out);
  if (optimize->parsed()) return cmd_optimize(opt_args, args, out);
  if (simulate->parsed()) return cmd_simulate(sim_args, args, out);
  return cmd_replay(manifest, out, err, replay_depth);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err, 0);
  } catch (const InputError& e) {
    err << "wqkd: input error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const IoError& e) {
    err << "wqkd: I/O error: " << e.what() << '\n';
    return kExitIoError;
  } catch (const NumericalError& e) {
    err << "wqkd: numerical error: " << e.what() << '\n';
    return kExitNumericalError;
  }
}

}  // namespace wqkd::cli
