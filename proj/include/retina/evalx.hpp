#pragma once

#include <map>
#include <string>
#include <vector>

#include "retina/discriminator.hpp"
#include "retina/qa.hpp"

namespace retina {

// 1 iff both NK or both logical forms are canonical-equal.
double exact_match(const Prediction& pred, const QAExample& gold);

// Both NA -> 1, exactly one NA -> 0, otherwise set F1 over elements.
double f1_regular(const std::optional<AnswerSet>& pred, const std::optional<AnswerSet>& gold);

// max of f1 against the incomplete-KB gold and the ideal-KB gold.
double f1_lenient(const std::optional<AnswerSet>& pred,
                  const std::optional<AnswerSet>& gold_incomplete,
                  const std::optional<AnswerSet>& gold_ideal);

struct PerQuestionEval {
  std::string qid;
  double em = 0.0;
  double f1r = 0.0;
  double f1l = 0.0;
  // none | thresholding | reranking | recall | wrong_lf (pool unknown) |
  // wrong_answer
  std::string error_class;
};

struct MetricCell {
  size_t n = 0;
  double em = 0.0;  // means over the n questions
  double f1r = 0.0;
  double f1l = 0.0;
};

struct EvalReport {
  MetricCell overall;
  MetricCell answerable;
  MetricCell unanswerable;
  std::map<std::string, MetricCell> by_category;
  std::map<std::string, MetricCell> by_generalization;
  std::map<std::string, size_t> error_counts;
  std::vector<PerQuestionEval> rows;
};

// Joins predictions to gold examples by position, requiring matching qids.
EvalReport evaluate_dataset(const std::vector<Prediction>& preds,
                            const std::vector<QAExample>& golds);

std::string report_to_json(const EvalReport& report, const std::string& config_echo = "");

// Fixed-width text: one block of overall/answerable/unanswerable metrics and
// one block per unanswerability category.
std::string report_to_table(const EvalReport& report, const std::string& row_label = "retina");

struct AblationResult {
  EvalReport report;
  double coverage = 0.0;  // gold form present in the pool, over gold-known questions
  size_t coverage_n = 0;
};

// Runs the full pipeline once per requested toggle plus the "full" baseline.
// Toggle names: lfr, lfi, sgsr, egc.
std::map<std::string, AblationResult> run_ablation(const std::vector<QAExample>& examples,
                                                   const KnowledgeBase& kb,
                                                   const PipelineComponents& comps,
                                                   const PipelineConfig& cfg,
                                                   const std::vector<std::string>& toggles);

}  // namespace retina
