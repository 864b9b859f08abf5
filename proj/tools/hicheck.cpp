#include <chrono>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hi/scenarios.hpp"
#include "json.hpp"

namespace {

struct Timed {
  hi::sc::ScenarioResult result;
  double seconds = 0;
};

Timed timed_run(const std::string& name, const hi::sc::RunOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  Timed t;
  t.result = hi::sc::run_scenario(name, opt);
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return t;
}

void print_result(const Timed& t) {
  const hi::sc::ScenarioResult& r = t.result;
  std::cout << (r.ok ? "[pass] " : "[FAIL] ") << r.name << "  ("
            << r.executions << " executions, " << t.seconds << "s)\n";
  std::cout << "    claim: " << r.claim << "\n";
  std::istringstream lines(r.detail);
  for (std::string line; std::getline(lines, line);)
    std::cout << "    " << line << "\n";
}

nlohmann::json to_json(const Timed& t) {
  return {{"name", t.result.name},
          {"ok", t.result.ok},
          {"claim", t.result.claim},
          {"detail", t.result.detail},
          {"executions", t.result.executions},
          {"seconds", t.seconds}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scenario runner for the history-independence test bench"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "list the available scenarios");

  std::vector<std::string> names;
  hi::sc::RunOptions opt;
  std::optional<std::uint64_t> steps, execs;
  std::optional<int> preempt;
  std::string report_path;
  auto* run = app.add_subcommand("run", "run scenarios by name, or 'all'");
  run->add_option("scenario", names, "scenario names, or 'all'")->required();
  run->add_option("--steps", steps, "per-execution step cutoff");
  run->add_option("--preemptions", preempt, "preemption budget per execution");
  run->add_option("--executions", execs, "stop an exploration after this many executions");
  run->add_option("--trace", opt.trace_path, "write the scenario's execution or witness here");
  run->add_option("--report", report_path, "write a json report here");

  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "re-run a recorded trace file");
  replay->add_option("file", replay_path, "trace file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const std::string& n : hi::sc::scenario_names()) std::cout << n << "\n";
      return 0;
    }
    if (replay->parsed()) {
      Timed t;
      auto t0 = std::chrono::steady_clock::now();
      t.result = hi::sc::replay_file(replay_path);
      t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      print_result(t);
      return t.result.ok ? 0 : 1;
    }

    opt.max_steps = steps;
    opt.max_preemptions = preempt;
    opt.max_executions = execs;
    if (names.size() == 1 && names[0] == "all") names = hi::sc::scenario_names();
    for (const std::string& n : names)
      if (!hi::sc::scenario_exists(n)) {
        std::cerr << "unknown scenario: " << n << "\n";
        return 2;
      }

    int failures = 0;
    nlohmann::json report = nlohmann::json::array();
    for (const std::string& n : names) {
      Timed t = timed_run(n, opt);
      print_result(t);
      report.push_back(to_json(t));
      if (!t.result.ok) ++failures;
    }
    if (!report_path.empty()) {
      std::ofstream out(report_path);
      out << report.dump(2) << "\n";
    }
    if (failures) std::cout << failures << " of " << names.size() << " scenarios failed\n";
    return failures ? 1 : 0;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
}
