#pragma once

#include <cstdint>
#include <string>

#include "retina/discriminator.hpp"

namespace retina {

// Flat key=value run configuration. Unknown keys are rejected; values are
// range-checked. The canonical echo re-parses to an equal config.
struct RunConfig {
  uint64_t seed = 13;
  int jobs = 1;
  std::string mode = "unanswerability";  // or "egc"
  int linker_top_k_per_mention = 1;
  int retriever_top_k = 10;
  int retriever_max_paths = 2000;
  int constructor_beam = 10;
  int constructor_schema_top_k = 10;
  int constructor_max_groundings = 5000;
  double train_lr = 0.1;
  int train_epochs = 50;
  int train_batch = 8;
  int train_negatives = 64;

  // Throws UsageError on unknown key, bad value, or out-of-range value.
  void set(const std::string& key, const std::string& value);

  // key=value pairs from a file, '#' comments ignored; later keys win.
  void apply_file(const std::string& path);

  // Single-line canonical echo: "key=value key=value ...".
  std::string echo() const;
  static RunConfig parse_echo(const std::string& text);

  PipelineConfig pipeline(const AblationToggles& toggles = {}) const;
  TrainConfig train() const;

  bool operator==(const RunConfig& o) const { return echo() == o.echo(); }
};

}  // namespace retina
