#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "themekg/config.h"
#include "themekg/errors.h"

namespace themekg {

enum class Stage {
  kOntology,
  kRelations,
  kMine,
  kType,
  kExtract,
  kAssemble,
  kEvaluate,
  kExportPrompt,
  kAll,
};

std::string_view to_string(Stage s);
Stage stage_from_string(std::string_view s);
// The stages chained by kAll, in order.
const std::vector<Stage> &all_stages();

// A stage could not run: missing inputs, misconfigured providers, or a
// config change in a run directory that already holds the stage.
class StageError : public Error {
 public:
  StageError(Stage stage, const std::string &message)
      : Error("stage " + std::string(to_string(stage)) + ": " + message),
        stage_(stage) {}
  Stage stage() const { return stage_; }

 private:
  Stage stage_;
};

struct PipelineOptions {
  bool force = false;
  // Offline fixture providers instead of network ones.
  bool mock = false;
};

// Runs stages against a run directory. Each stage records in manifest.json
// a hash of its config sections and input checksums, its artifact
// checksums, counters and provider cache statistics. Re-running a stage
// whose hash is unchanged is a no-op; a changed hash is refused unless
// force is set.
class Pipeline {
 public:
  Pipeline(Config config, std::filesystem::path run_dir,
           PipelineOptions options = {});
  ~Pipeline();

  void run(Stage stage);

  // Stages actually executed (not skipped) by this object, in order.
  const std::vector<Stage> &executed() const { return executed_; }
  const std::filesystem::path &run_dir() const { return run_dir_; }

 private:
  struct Providers;

  void run_one(Stage stage);
  nlohmann::json execute(Stage stage);
  std::vector<std::string> inputs_of(Stage stage) const;
  std::vector<std::string> outputs_of(Stage stage) const;
  std::string stage_hash(Stage stage);
  std::filesystem::path artifact(std::string_view name) const;
  std::string require(Stage stage, std::string_view name) const;
  void write_artifact(std::string_view name, std::string_view contents);
  const std::vector<Document> &documents();
  Providers &providers();

  nlohmann::json stage_ontology();
  nlohmann::json stage_relations();
  nlohmann::json stage_mine();
  nlohmann::json stage_type();
  nlohmann::json stage_extract();
  nlohmann::json stage_assemble();
  nlohmann::json stage_evaluate();
  nlohmann::json stage_export_prompt();

  Config config_;
  std::filesystem::path run_dir_;
  PipelineOptions options_;
  nlohmann::json manifest_;
  std::unique_ptr<Providers> providers_;
  std::optional<std::vector<Document>> documents_;
  std::vector<Stage> executed_;
  Stage current_ = Stage::kAll;
};

}  // namespace themekg
