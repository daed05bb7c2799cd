#include "varlie/dsl.hpp"
#include "varlie/linsys.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

int run_check(const std::string& path, const std::string& emit,
              varlie::RunFlags flags) {
  std::string src;
  if (!read_file(path, src)) {
    std::cerr << "cannot read '" << path << "'\n";
    return 3;
  }
  auto parsed = varlie::parse_scenario(src);
  if (!parsed.ok) {
    std::cerr << varlie::format_diagnostics(path, parsed.diags);
    return 3;
  }
  auto rep = varlie::run_scenario(*parsed.scenario, flags);
  rep.scenario = path;
  if (emit == "tree")
    std::cout << varlie::render_tree(rep, flags.timing);
  else
    std::cout << varlie::render_text(rep, flags.timing);
  return rep.exit_code();
}

int run_parse(const std::string& path) {
  std::string src;
  if (!read_file(path, src)) {
    std::cerr << "cannot read '" << path << "'\n";
    return 3;
  }
  auto parsed = varlie::parse_scenario(src);
  if (!parsed.ok) {
    std::cerr << varlie::format_diagnostics(path, parsed.diags);
    return 3;
  }
  std::cout << "parse ok: " << parsed.scenario->tasks.size() << " tasks\n";
  return 0;
}

int run_search(int max_weight, int weight, bool formal, int order,
               const std::string& emit, int jobs) {
  if (jobs > 0) varlie::set_jobs(jobs);
  std::vector<varlie::WeightReport> reps;
  if (max_weight > 0) {
    reps = varlie::search_up_to(max_weight, formal, order);
  } else {
    varlie::AnsatzSpec spec;
    spec.weight = weight;
    spec.max_order = order;
    spec.formal = formal;
    reps = {varlie::search_weight(spec)};
  }
  if (emit == "tree")
    std::cout << varlie::render_search_tree(reps);
  else
    std::cout << varlie::render_search_report(reps);
  for (const auto& w : reps) {
    if (!w.notes.empty()) return 2;
    for (const auto& e : w.entries)
      if (e.status != "verified") return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "varlie: exact calculus of local differential operators, section "
      "brackets, and homological vector fields on jet spaces"};
  app.require_subcommand(1);

  std::string path, emit = "text";
  varlie::RunFlags flags;

  auto* check = app.add_subcommand(
      "check", "parse a scenario file and execute its task list");
  check->add_option("file", path, "scenario file")->required();
  check->add_option("--order-bound", flags.order_bound,
                    "ansatz order bound for tasks without an explicit one");
  check->add_option("--emit", emit, "report format: text or tree")
      ->check(CLI::IsMember({"text", "tree"}));
  check->add_option("--jobs", flags.jobs, "worker threads for the solvers");
  check->add_flag("--timing", flags.timing, "append per-task timing lines");

  auto* parse = app.add_subcommand(
      "parse", "parse and bind a scenario file without running tasks");
  parse->add_option("file", path, "scenario file")->required();

  int max_weight = 0, weight = 0, order = -1, jobs = 0;
  bool formal = false;
  std::string semit = "text";
  auto* search = app.add_subcommand(
      "search", "census of skew-adjoint operator ansatze by scaling weight");
  auto* ow = search->add_option("--weight", weight, "single weight to scan");
  auto* omw = search->add_option("--max-weight", max_weight,
                                 "scan every weight up to this bound");
  ow->excludes(omw);
  search->add_option("--order", order, "cap the differential order");
  search->add_flag("--formal-f", formal,
                   "allow formal function coefficients in the ansatz");
  search->add_option("--emit", semit, "report format: text or tree")
      ->check(CLI::IsMember({"text", "tree"}));
  search->add_option("--jobs", jobs, "worker threads for the solvers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  if (check->parsed()) return run_check(path, emit, flags);
  if (parse->parsed()) return run_parse(path);
  if (search->parsed()) {
    if (max_weight <= 0 && weight <= 0) {
      std::cerr << "search needs --weight or --max-weight\n";
      return 3;
    }
    return run_search(max_weight, weight, formal, order, semit, jobs);
  }
  return 3;
}
