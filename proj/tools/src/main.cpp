#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dframe/runner.hpp"

namespace runner = dframe::runner;

int main(int argc, char** argv) {
  CLI::App app{"dframe: frames, distribution maps and multipliers on sampled measure spaces"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  bool as_json = false;

  auto* run = app.add_subcommand("run", "Run the suites selected by a JSON config");
  run->add_option("config", config, "Experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "Report directory (overrides output.dir)");
  run->add_option("--tol", tol, "Residual tolerance (overrides tolerances.residual)");
  run->add_option("--seed", seed, "Root seed (overrides seed)");
  run->add_flag("--json", as_json, "Print the run summary as JSON");

  bool list_json = false;
  auto* list = app.add_subcommand("list-families", "Print the builtin families");
  list->add_flag("--json", list_json, "Print the catalog as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return runner::kExitParse;
  }

  if (list->parsed()) {
    const auto catalog = runner::family_catalog();
    if (list_json)
      std::cout << catalog.dump(2) << '\n';
    else
      std::cout << runner::catalog_text(catalog);
    return runner::kExitOk;
  }

  runner::Overrides ov;
  if (!out_dir.empty()) ov.out = out_dir;
  ov.tol = tol;
  ov.seed = seed;
  const auto result = runner::run(config, ov);

  if (as_json) {
    std::cout << result.summary.dump(2) << '\n';
  } else if (!result.error.empty()) {
    std::cerr << "error: " << result.error << '\n';
  } else {
    for (const auto& s : result.suites) {
      std::cout << (s.passed ? "PASS " : "FAIL ") << s.name << '\n';
      for (const auto& f : s.failures) std::cout << "     " << f << '\n';
    }
    std::cout << "reports: " << result.out_dir.string() << '\n';
  }
  return result.exit_code;
}
