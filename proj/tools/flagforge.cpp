#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "flagforge/session.hpp"

int main(int argc, char** argv) {
  CLI::App app{"flagforge: exact structure theory of finitary Lie algebras"};
  app.require_subcommand(1);

  std::string session_path, report_path, emit_path;
  flagforge::RunOptions opts;
  auto* run = app.add_subcommand("run", "Execute a session file and write a report");
  run->add_option("session", session_path, "Session JSON file")->required();
  run->add_option("--seed", opts.seed, "Seed for randomized oracle searches")->default_val(flagforge::kDefaultSeed);
  run->add_flag("--parallel", opts.parallel, "Run commands concurrently");
  run->add_option("--report", report_path, "Write the report here instead of stdout");
  run->add_flag("--timing", opts.timing, "Add per-command wall time (makes reports non-deterministic)");
  run->add_option("--emit", emit_path, "Also write every defined object in session form");

  CLI11_PARSE(app, argc, argv);

  std::ifstream in(session_path, std::ios::binary);
  if (!in) {
    std::cerr << "flagforge: cannot read " << session_path << "\n";
    return 2;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  flagforge::RunResult r = flagforge::run_session_text(buf.str(), opts);
  if (!emit_path.empty() && r.exit_code != 2) {
    std::ofstream(emit_path) << flagforge::emit_objects(flagforge::load_session_text(buf.str())).dump(2) << "\n";
  }

  const std::string text = r.report.dump(2);
  if (report_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream out(report_path);
    if (!out) {
      std::cerr << "flagforge: cannot write " << report_path << "\n";
      return 2;
    }
    out << text << "\n";
  }
  if (r.report.contains("error")) std::cerr << "flagforge: " << r.report["error"].dump() << "\n";
  return r.exit_code;
}
