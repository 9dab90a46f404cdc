#include <cstdio>
#include <string>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "themekg/pipeline.h"

int main(int argc, char **argv) {
  CLI::App app{"themekg: build a theme-specific knowledge graph from a corpus"};
  std::string config_path;
  std::string stage_name = "all";
  std::string run_dir;
  bool force = false;
  bool mock = false;
  bool verbose = false;
  app.add_option("--config", config_path, "Run configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--stage", stage_name,
                 "ontology, relations, mine, type, extract, assemble, evaluate, "
                 "export-prompt or all");
  app.add_option("--run-dir", run_dir, "Directory for artifacts and manifest")
      ->required();
  app.add_flag("--force", force, "Re-run a stage whose configuration changed");
  app.add_flag("--mock-providers", mock, "Use offline fixture providers");
  app.add_flag("-v,--verbose", verbose, "Debug logging");
  CLI11_PARSE(app, argc, argv);

  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  themekg::Stage stage;
  try {
    stage = themekg::stage_from_string(stage_name);
  } catch (const themekg::Error &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  try {
    auto config = themekg::Config::from_file(config_path);
    themekg::Pipeline pipeline(std::move(config), run_dir, {force, mock});
    pipeline.run(stage);
  } catch (const themekg::StageError &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: stage %s: %s\n", stage_name.c_str(), e.what());
    return 1;
  }
  return 0;
}
