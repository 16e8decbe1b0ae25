#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sconv/harness/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Shifted convolution experiments"};
  app.require_subcommand(1);

  std::string config, output, dir;
  auto* run = app.add_subcommand("run", "run one experiment config");
  run->add_option("config", config, "config file")->required();
  run->add_option("-o,--output", output, "override run.output");

  auto* report = app.add_subcommand("report", "summarise a run directory");
  report->add_option("dir", dir, "output directory")->required();

  auto* self = app.add_subcommand("selftest", "quick built-in checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return sconv::harness::run(config, std::cout, std::cerr, output);
    if (*report) {
      const auto s = sconv::harness::report_render(dir);
      std::cout << s.text;
      return s.fail ? 1 : 0;
    }
    if (*self) return sconv::harness::selftest();
  } catch (const sconv::harness::ConfigError& e) {
    std::cerr << sconv::harness::error_json(e.key(), e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
