#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "iofm/engine.hpp"
#include "iofm/log.hpp"
#include "iofm/scenario.hpp"
#include "iofm/simrun.hpp"

namespace {

using namespace iofm;

constexpr int kOk = 0;
constexpr int kValidationFailure = 1;
constexpr int kRuntimeError = 2;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::parse_error:
    case Errc::validation_failed:
      return kValidationFailure;
    default:
      return kRuntimeError;
  }
}

int cmd_validate(const std::string& path) {
  scenario::Scenario sc = scenario::load_scenario(path);
  topology::ValidationReport report = scenario::validate_scenario(sc);
  if (report.empty()) {
    std::printf("scenario '%s' is valid (%s, %zu domains, %zu services)\n", sc.name.c_str(),
                topology::topology_class_name(sc.network.topology_class()),
                sc.network.domains().size(), sc.network.services().size());
    return kOk;
  }
  for (const topology::Violation& v : report)
    std::printf("violation [%s] %s\n", v.code.c_str(), v.detail.c_str());
  return kValidationFailure;
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, const std::string& out) {
  scenario::Scenario sc = scenario::load_scenario(path);
  if (seed) {
    sc.seed = *seed;
    sc.seed_present = true;
  }
  simrun::SimResult result = simrun::run_scenario(sc);
  simrun::write_result(result, out);
  std::printf("run complete: %zu faults, %llu messages sent, %.1f ms\n", result.outcomes.size(),
              static_cast<unsigned long long>(result.counters.sent), result.wall_ms);
  std::printf("outputs: %s/{registry.json,trace.jsonl,audit.jsonl,outcomes.json}\n", out.c_str());
  return kOk;
}

std::string csv_cell(const ojson& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string to_csv(const std::string& kind, const ojson& data) {
  std::ostringstream out;
  if (kind == "statistics") {
    out << "domain,faultCount,meanTimeToIsolate,meanTimeToRepair,messagesSent,responded,incomplete\n";
    const ojson incomplete = data.at("incomplete");
    for (const ojson& row : data.at("rows"))
      out << csv_cell(row.at("domain")) << ',' << csv_cell(row.at("faultCount")) << ','
          << csv_cell(row.at("meanTimeToIsolate")) << ',' << csv_cell(row.at("meanTimeToRepair"))
          << ',' << csv_cell(row.at("messagesSent")) << ',' << csv_cell(row.at("responded")) << ','
          << csv_cell(incomplete) << '\n';
  } else if (kind == "qos") {
    out << "service,metric,measured,bound,violated\n";
    for (const ojson& row : data.at("rows"))
      out << csv_cell(row.at("service")) << ',' << csv_cell(row.at("metric")) << ','
          << csv_cell(row.at("measured")) << ',' << csv_cell(row.at("bound")) << ','
          << csv_cell(row.at("violated")) << '\n';
  } else {
    out << "domain,slope,intercept,projectedBreachTick,threshold\n";
    const ojson threshold = data.at("threshold");
    for (const ojson& row : data.at("rows"))
      out << csv_cell(row.at("domain")) << ',' << csv_cell(row.at("slope")) << ','
          << csv_cell(row.at("intercept")) << ',' << csv_cell(row.at("projectedBreachTick")) << ','
          << csv_cell(threshold) << '\n';
  }
  return out.str();
}

int cmd_report(const std::string& dir, const std::string& kind, const std::string& format) {
  std::ifstream in(dir + "/outcomes.json");
  if (!in) raise(Errc::io_error, "missing '" + dir + "/outcomes.json' (run a scenario first)");
  std::ostringstream buf;
  buf << in.rdbuf();
  ojson outcomes = ojson::parse(buf.str());
  if (!outcomes.contains("plotData") || !outcomes["plotData"].is_object())
    raise(Errc::validation_failed, "result directory carries no plot data");
  const ojson& data = outcomes["plotData"].at(kind);

  std::string body = format == "csv" ? to_csv(kind, data) : data.dump(2) + "\n";
  std::string path = dir + "/report-" + kind + "." + format;
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::io_error, "cannot write '" + path + "'");
  out << body;
  std::fputs(body.c_str(), stdout);
  std::printf("written: %s\n", path.c_str());
  return kOk;
}

int cmd_matrix(const std::string& path, const std::string& results) {
  scenario::Scenario sc = scenario::load_scenario(path);
  engine::CapabilityMatrix m = engine::capability_matrix(sc.network);
  std::printf("topology class: %s\n", topology::topology_class_name(m.topo_class));
  std::printf("use case coverage:\n");
  for (engine::UseCase u : engine::all_use_cases())
    std::printf("  %-4s %s\n", engine::use_case_name(u),
                m.supported.at(u) ? "supported" : "not supported");

  if (results.empty()) return kOk;

  std::ifstream in(results + "/audit.jsonl");
  if (!in) raise(Errc::io_error, "missing '" + results + "/audit.jsonl'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  std::set<std::pair<std::string, std::string>> observed;
  for (const engine::AuditEvent& e : simrun::parse_audit_lines(lines))
    if (e.type == "usecase-phase")
      observed.emplace(e.data.at("useCase").get<std::string>(),
                       e.data.at("phase").get<std::string>());

  std::printf("observed phase coverage:\n");
  bool all_rows_supported = true;
  for (const auto& [row, phases] : engine::phase_rows()) {
    std::string cells;
    bool row_complete = true;
    for (faultmodel::LifecyclePhase p : phases) {
      bool hit = observed.count({row, faultmodel::phase_name(p)}) > 0;
      if (!hit) row_complete = false;
      cells += std::string(" ") + faultmodel::phase_name(p) + (hit ? "[x]" : "[ ]");
    }
    if (!row_complete) all_rows_supported = false;
    std::printf("  %-6s%s\n", row.c_str(), cells.c_str());
  }
  std::size_t extras = 0;
  for (const auto& [row, phase] : observed) {
    bool known = false;
    for (const auto& [name, phases] : engine::phase_rows()) {
      if (name != row) continue;
      for (faultmodel::LifecyclePhase p : phases)
        if (phase == faultmodel::phase_name(p)) known = true;
    }
    if (!known) extras++;
  }
  std::printf("matrix %s (%zu unexpected cells)\n", all_rows_supported && extras == 0 ? "covered" : "partial",
              extras);
  return kOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"inter-organizational fault management simulator"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "out", result_dir, kind = "statistics", format = "csv";
  std::string results;
  std::optional<std::uint64_t> seed;

  CLI::App* validate = app.add_subcommand("validate", "parse and validate a scenario file");
  validate->add_option("scenario", scenario_path, "scenario JSON file")->required();

  CLI::App* run = app.add_subcommand("run", "run a scenario and write result files");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--out", out_dir, "output directory (default: out)");

  CLI::App* report = app.add_subcommand("report", "export plot data from a result directory");
  report->add_option("results", result_dir, "result directory of a previous run")->required();
  report->add_option("--kind", kind, "statistics|qos|trend")
      ->check(CLI::IsMember({"statistics", "qos", "trend"}));
  report->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

  CLI::App* matrix = app.add_subcommand("matrix", "print use-case and phase coverage");
  matrix->add_option("scenario", scenario_path, "scenario JSON file")->required();
  matrix->add_option("--results", results, "result directory with audit.jsonl");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(scenario_path);
    if (run->parsed()) return cmd_run(scenario_path, seed, out_dir);
    if (report->parsed()) return cmd_report(result_dir, kind, format);
    if (matrix->parsed()) return cmd_matrix(scenario_path, results);
  } catch (const iofm::Error& e) {
    iofm::log::error(e.what());
    std::fprintf(stderr, "%s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeError;
  }
  return kRuntimeError;
}
