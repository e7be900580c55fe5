#include "retina/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "retina/errors.hpp"

namespace retina {

namespace {

long long parse_int(const std::string& key, const std::string& value, long long lo,
                    long long hi) {
  try {
    size_t pos = 0;
    long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    if (v < lo || v > hi)
      throw UsageError("config: " + key + "=" + value + " out of range [" + std::to_string(lo) +
                       ", " + std::to_string(hi) + "]");
    return v;
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("config: " + key + " expects an integer, got '" + value + "'");
  }
}

double parse_pos_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    if (!(v > 0)) throw UsageError("config: " + key + " must be positive");
    return v;
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("config: " + key + " expects a number, got '" + value + "'");
  }
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "seed") {
    seed = static_cast<uint64_t>(parse_int(key, value, 0, INT64_MAX));
  } else if (key == "jobs") {
    jobs = static_cast<int>(parse_int(key, value, 1, 1024));
  } else if (key == "mode") {
    if (value != "unanswerability" && value != "egc")
      throw UsageError("config: mode must be 'unanswerability' or 'egc', got '" + value + "'");
    mode = value;
  } else if (key == "linker.top_k_per_mention") {
    linker_top_k_per_mention = static_cast<int>(parse_int(key, value, 1, 1000));
  } else if (key == "retriever.top_k") {
    retriever_top_k = static_cast<int>(parse_int(key, value, 1, 1000000));
  } else if (key == "retriever.max_paths") {
    retriever_max_paths = static_cast<int>(parse_int(key, value, 0, 100000000));
  } else if (key == "constructor.beam") {
    constructor_beam = static_cast<int>(parse_int(key, value, 1, 1000000));
  } else if (key == "constructor.schema_top_k") {
    constructor_schema_top_k = static_cast<int>(parse_int(key, value, 1, 1000000));
  } else if (key == "constructor.max_groundings") {
    constructor_max_groundings = static_cast<int>(parse_int(key, value, 0, 100000000));
  } else if (key == "train.lr") {
    train_lr = parse_pos_double(key, value);
  } else if (key == "train.epochs") {
    train_epochs = static_cast<int>(parse_int(key, value, 0, 10000000));
  } else if (key == "train.batch") {
    train_batch = static_cast<int>(parse_int(key, value, 1, 10000000));
  } else if (key == "train.negatives") {
    train_negatives = static_cast<int>(parse_int(key, value, 1, 10000000));
  } else {
    throw UsageError("config: unknown key '" + key + "'");
  }
}

void RunConfig::apply_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open config file");
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError(path + ":" + std::to_string(lineno) + ": expected key=value");
    set(line.substr(0, eq), line.substr(eq + 1));
  }
}

std::string RunConfig::echo() const {
  std::ostringstream out;
  char lr[40];
  std::snprintf(lr, sizeof(lr), "%.17g", train_lr);
  out << "constructor.beam=" << constructor_beam
      << " constructor.max_groundings=" << constructor_max_groundings
      << " constructor.schema_top_k=" << constructor_schema_top_k << " jobs=" << jobs
      << " linker.top_k_per_mention=" << linker_top_k_per_mention << " mode=" << mode
      << " retriever.max_paths=" << retriever_max_paths
      << " retriever.top_k=" << retriever_top_k << " seed=" << seed
      << " train.batch=" << train_batch << " train.epochs=" << train_epochs
      << " train.lr=" << lr << " train.negatives=" << train_negatives;
  return out.str();
}

RunConfig RunConfig::parse_echo(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string pair;
  while (in >> pair) {
    size_t eq = pair.find('=');
    if (eq == std::string::npos) throw UsageError("config echo: expected key=value, got '" + pair + "'");
    cfg.set(pair.substr(0, eq), pair.substr(eq + 1));
  }
  return cfg;
}

PipelineConfig RunConfig::pipeline(const AblationToggles& toggles) const {
  PipelineConfig p;
  p.retriever.top_k = retriever_top_k;
  p.retriever.max_paths = retriever_max_paths;
  p.construct.beam = constructor_beam;
  p.construct.schema_top_k = constructor_schema_top_k;
  p.construct.max_groundings = constructor_max_groundings;
  p.linker_top_k = linker_top_k_per_mention;
  p.mode = mode == "egc" ? DecideMode::Egc : DecideMode::Unanswerability;
  p.toggles = toggles;
  p.jobs = jobs;
  return p;
}

TrainConfig RunConfig::train() const {
  TrainConfig t;
  t.lr = train_lr;
  t.epochs = train_epochs;
  t.batch = train_batch;
  t.negatives_per_example = train_negatives;
  t.seed = seed;
  return t;
}

}  // namespace retina
