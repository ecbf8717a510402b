#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "genfe/cli/config.hpp"
#include "genfe/cli/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Coupled potential / heat finite element driver"};
  app.set_version_flag("--version", genfe::cli::kVersion);
  app.footer(genfe::cli::schemaHelp());
  app.require_subcommand(1);

  std::string configPath;
  std::vector<std::string> overrides;
  bool dumpGraph = false;
  CLI::App* run = app.add_subcommand("run", "run the analysis described by a config file");
  run->add_option("config", configPath, "config file")->required();
  run->add_option("overrides", overrides, "section.key=value overrides");
  run->add_flag("--dump-graph", dumpGraph, "write the evaluator graph of every evaluation type (.dot and .txt)");
  run->footer(genfe::cli::schemaHelp());

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const auto config = genfe::cli::RunConfig::fromFile(configPath, overrides);
    const auto outcome = genfe::cli::run(config, {dumpGraph, &std::cerr});
    std::cout << outcome.summary.dump(2) << "\n";
    return outcome.exitCode;
  } catch (const genfe::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
