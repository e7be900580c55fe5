#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "retina/entity_linker.hpp"
#include "retina/executor.hpp"
#include "retina/kb.hpp"
#include "retina/lf_constructor.hpp"
#include "retina/lf_retriever.hpp"
#include "retina/qa.hpp"
#include "retina/scorer.hpp"

namespace retina {

// Pipeline output for one question. logical_form == nullptr means NK;
// answer == nullopt means NA. NK implies NA; NA with a logical form means
// that form executed to the empty set.
struct Prediction {
  std::string qid;
  SExprPtr logical_form;
  std::optional<AnswerSet> answer;
  std::optional<double> top_score;
  size_t n_candidates = 0;
  // in-memory diagnostics, not part of the predictions file
  std::optional<bool> gold_in_candidates;

  bool is_nk() const { return logical_form == nullptr; }
  bool is_na() const { return !answer.has_value(); }
};

// Union of retriever and constructor outputs, deduplicated on the canonical
// printed form (duplicates merge to source=both), ordered by that form.
std::vector<CandidateLogicalForm> assemble_candidates(
    const std::vector<CandidateLogicalForm>& retrieved,
    const std::vector<CandidateLogicalForm>& constructed);

enum class DecideMode {
  Unanswerability,  // threshold to NK, execute, empty -> NA
  Egc,              // first candidate in score order with a non-empty answer
  Plain,            // top candidate, no threshold, no execution check
};

Prediction decide(const std::string& question,
                  const std::vector<CandidateLogicalForm>& candidates, const Scorer& scorer,
                  const Threshold& threshold, const KnowledgeBase& kb, DecideMode mode);

struct AblationToggles {
  bool lfr = false;   // disable the path-traversal retriever
  bool lfi = false;   // pass groundings unchecked
  bool sgsr = false;  // disable sketch generation + schema retrieval
  bool egc = false;   // disable the execution-guided check
};

struct PipelineComponents {
  std::shared_ptr<Scorer> retriever_scorer;
  std::shared_ptr<Scorer> sketch_ranker;
  std::shared_ptr<Scorer> type_scorer;
  std::shared_ptr<Scorer> relation_scorer;
  std::shared_ptr<Scorer> discriminator_scorer;
  SketchInventory inventory;
  Threshold threshold;

  // Every stage backed by the fixed lexical baseline, threshold at 0.
  static PipelineComponents baseline();
};

struct PipelineConfig {
  RetrieverConfig retriever;
  ConstructorConfig construct;
  int linker_top_k = 1;
  DecideMode mode = DecideMode::Unanswerability;
  AblationToggles toggles;
  int jobs = 1;
};

// Per-stage candidate enumeration for one question, honoring the ablation
// toggles.
struct StagedCandidates {
  LinkedEntities linked;
  std::vector<CandidateLogicalForm> retrieved;  // already top-k ranked
  std::vector<CandidateLogicalForm> constructed;
  std::vector<CandidateLogicalForm> pool;
};

StagedCandidates enumerate_candidates(const std::string& question, const KnowledgeBase& kb,
                                      const AliasLexicon& lexicon,
                                      const PipelineComponents& comps,
                                      const PipelineConfig& cfg);

struct RunRecord {
  Prediction prediction;
  bool had_error = false;
  std::string error_component;
  std::string error_message;
};

// link -> retrieve -> construct -> assemble -> decide for every example;
// questions are isolated (a failure yields an error record, not an abort)
// and processed in parallel up to cfg.jobs, results in input order.
std::vector<RunRecord> run_pipeline(const std::vector<QAExample>& examples,
                                    const KnowledgeBase& kb, const PipelineComponents& comps,
                                    const PipelineConfig& cfg);

// For a question whose gold form is missing from the pool: replays the
// pipeline with one stage at a time replaced by its oracle and reports which
// substitutions recover the gold. Subsets of
// {entity_linking, schema_retrieval, sketch_generation}; may intersect.
std::set<std::string> attribute_recall(const QAExample& ex, const KnowledgeBase& kb,
                                       const AliasLexicon& lexicon,
                                       const PipelineComponents& comps,
                                       const PipelineConfig& cfg);

// Predictions file: JSON-lines {qid, lf, answer, score, n_candidates}.
void save_predictions(const std::vector<Prediction>& preds, const std::string& path,
                      const std::string& header_comment = "");
std::vector<Prediction> load_predictions(const std::string& path, const IdClassifier& ids);

// Sidecar diagnostics: JSON-lines {qid, gold_in_candidates?, had_error,
// error_component?}.
void save_run_records(const std::vector<RunRecord>& records, const std::string& path);
void merge_run_records(std::vector<Prediction>& preds, const std::string& records_path);

}  // namespace retina
