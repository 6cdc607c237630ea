#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "strongmoment/cli.hpp"

using namespace strongmoment;

int main(int argc, char** argv) {
  CLI::App app{"strong matrix Stieltjes moment problem solver"};
  app.require_subcommand(1);

  CliOptions opt;
  bool as_json = false;
  std::string path;

  auto common = [&](CLI::App* sub, bool needs_file) {
    if (needs_file) sub->add_option("instance", path, "instance JSON file")->required();
    sub->add_option("--tol", opt.tol, "PSD tolerance relative to block norm");
    sub->add_flag("--strict", opt.strict, "treat KernelWarning/RangeConditionViolated as failures");
    sub->add_flag("--json", as_json, "print the JSON report");
  };

  auto* check = app.add_subcommand("check", "block-Hankel positivity verdicts");
  common(check, true);
  auto* det = app.add_subcommand("determinacy", "determinacy flag, |C|, dim Re");
  common(det, true);
  auto* solve = app.add_subcommand("solve", "recover solution measures");
  common(solve, true);
  solve->add_option("--K", opt.k_spec, "mu | M | mid | matrix file, comma separated for a sweep");
  solve->add_option("--invert", opt.invert, "spectral | perron | both")
      ->check(CLI::IsMember({"spectral", "perron", "both"}));
  solve->add_option("--jobs", opt.jobs, "threads for K sweeps")->check(CLI::PositiveNumber);
  auto* rt = app.add_subcommand("roundtrip", "measure -> moments -> solution -> compare");
  common(rt, true);
  rt->add_option("--K", opt.k_spec, "mu | M | mid | matrix file");
  auto* ex = app.add_subcommand("example", "built-in N=2 constant sequence");
  common(ex, false);
  ex->add_option("--m", opt.m, "truncation order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  Report report;
  if (ex->parsed()) {
    report = cmd_example(opt);
  } else {
    CLI::App* sub = app.get_subcommands().front();
    report.command = sub->get_name();
    try {
      const Instance inst = instance_from_json(read_json_file(path));
      if (sub == check) report = cmd_check(inst, opt);
      if (sub == det) report = cmd_determinacy(inst, opt);
      if (sub == solve) report = cmd_solve(inst, opt);
      if (sub == rt) report = cmd_roundtrip(inst, opt);
    } catch (const Error& e) {
      report.error = e.what();
      report.exit_code = kExitParse;
    }
  }

  if (as_json) {
    std::cout << json(report).dump(2) << "\n";
  } else {
    std::cout << render_text(report);
  }
  return report.exit_code;
}
