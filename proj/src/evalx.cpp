#include "retina/evalx.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "retina/errors.hpp"

namespace retina {

using nlohmann::json;

double exact_match(const Prediction& pred, const QAExample& gold) {
  bool pred_nk = pred.is_nk();
  bool gold_nk = gold.gold_is_nk();
  if (pred_nk && gold_nk) return 1.0;
  if (pred_nk != gold_nk) return 0.0;
  return canonical_key(pred.logical_form) == canonical_key(gold.gold_lf) ? 1.0 : 0.0;
}

double f1_regular(const std::optional<AnswerSet>& pred, const std::optional<AnswerSet>& gold) {
  bool pred_na = !pred.has_value();
  bool gold_na = !gold.has_value();
  if (pred_na && gold_na) return 1.0;
  if (pred_na != gold_na) return 0.0;
  if (pred->empty() && gold->empty()) return 1.0;
  size_t inter = 0;
  for (const auto& x : *pred)
    if (gold->count(x)) ++inter;
  if (inter == 0) return 0.0;
  double p = static_cast<double>(inter) / static_cast<double>(pred->size());
  double r = static_cast<double>(inter) / static_cast<double>(gold->size());
  return 2.0 * p * r / (p + r);
}

double f1_lenient(const std::optional<AnswerSet>& pred,
                  const std::optional<AnswerSet>& gold_incomplete,
                  const std::optional<AnswerSet>& gold_ideal) {
  double base = f1_regular(pred, gold_incomplete);
  if (!gold_ideal.has_value()) return base;
  return std::max(base, f1_regular(pred, gold_ideal));
}

namespace {

struct Sums {
  size_t n = 0;
  double em = 0, f1r = 0, f1l = 0;
  void add(double e, double r, double l) {
    ++n;
    em += e;
    f1r += r;
    f1l += l;
  }
  MetricCell cell() const {
    if (n == 0) return {};
    return {n, em / static_cast<double>(n), f1r / static_cast<double>(n),
            f1l / static_cast<double>(n)};
  }
};

std::string classify_error(const Prediction& pred, const QAExample& gold, double em) {
  if (em == 1.0) return "none";
  bool pred_nk = pred.is_nk();
  bool gold_nk = gold.gold_is_nk();
  if (pred_nk != gold_nk) return "thresholding";
  if (!pred_nk && !gold_nk) {
    if (pred.gold_in_candidates.has_value())
      return *pred.gold_in_candidates ? "reranking" : "recall";
    return "wrong_lf";
  }
  return "wrong_answer";  // same NK status, same form, answers differ
}

}  // namespace

EvalReport evaluate_dataset(const std::vector<Prediction>& preds,
                            const std::vector<QAExample>& golds) {
  if (preds.size() != golds.size())
    throw std::invalid_argument("evaluate_dataset: " + std::to_string(preds.size()) +
                                " predictions vs " + std::to_string(golds.size()) + " examples");

  EvalReport report;
  Sums overall, answerable, unanswerable;
  std::map<std::string, Sums> by_cat, by_gen;

  for (size_t i = 0; i < preds.size(); ++i) {
    const Prediction& p = preds[i];
    const QAExample& g = golds[i];
    if (p.qid != g.qid)
      throw std::invalid_argument("evaluate_dataset: qid mismatch at row " + std::to_string(i) +
                                  " (" + p.qid + " vs " + g.qid + ")");
    double em = exact_match(p, g);
    double f1r = f1_regular(p.answer, g.gold_answer);
    double f1l = f1_lenient(p.answer, g.gold_answer, g.gold_answer_ideal);
    std::string err = classify_error(p, g, em);

    report.rows.push_back({p.qid, em, f1r, f1l, err});
    overall.add(em, f1r, f1l);
    (g.category == Category::Answerable ? answerable : unanswerable).add(em, f1r, f1l);
    by_cat[category_name(g.category)].add(em, f1r, f1l);
    if (g.generalization) by_gen[generalization_name(*g.generalization)].add(em, f1r, f1l);
    if (err != "none") ++report.error_counts[err];
  }

  report.overall = overall.cell();
  report.answerable = answerable.cell();
  report.unanswerable = unanswerable.cell();
  for (const auto& [k, s] : by_cat) report.by_category[k] = s.cell();
  for (const auto& [k, s] : by_gen) report.by_generalization[k] = s.cell();
  return report;
}

namespace {

json cell_to_json(const MetricCell& c) {
  return json{{"n", c.n}, {"em", c.em}, {"f1_r", c.f1r}, {"f1_l", c.f1l}};
}

}  // namespace

std::string report_to_json(const EvalReport& report, const std::string& config_echo) {
  json j;
  if (!config_echo.empty()) j["config"] = config_echo;
  j["overall"] = cell_to_json(report.overall);
  j["answerable"] = cell_to_json(report.answerable);
  j["unanswerable"] = cell_to_json(report.unanswerable);
  json cats = json::object();
  for (const auto& [k, c] : report.by_category) cats[k] = cell_to_json(c);
  j["by_category"] = cats;
  json gens = json::object();
  for (const auto& [k, c] : report.by_generalization) gens[k] = cell_to_json(c);
  j["by_generalization"] = gens;
  json errs = json::object();
  for (const auto& [k, n] : report.error_counts) errs[k] = n;
  j["error_counts"] = errs;
  json rows = json::array();
  for (const auto& r : report.rows)
    rows.push_back(json{{"qid", r.qid},
                        {"em", r.em},
                        {"f1_r", r.f1r},
                        {"f1_l", r.f1l},
                        {"error", r.error_class}});
  j["questions"] = rows;
  return j.dump(2);
}

namespace {

std::string pct(double v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%6.2f", v * 100.0);
  return buf;
}

void cell_row(std::ostringstream& out, const std::string& label, const MetricCell& c) {
  out << "  " << label;
  for (size_t i = label.size(); i < 26; ++i) out << ' ';
  out << pct(c.f1l) << ' ' << pct(c.f1r) << ' ' << pct(c.em) << "   n=" << c.n << '\n';
}

}  // namespace

std::string report_to_table(const EvalReport& report, const std::string& row_label) {
  std::ostringstream out;
  out << row_label << '\n';
  out << "                             F1(L)  F1(R)     EM\n";
  cell_row(out, "overall", report.overall);
  cell_row(out, "answerable", report.answerable);
  cell_row(out, "unanswerable", report.unanswerable);
  bool has_categories = false;
  for (const auto& [k, c] : report.by_category)
    if (k != "answerable" && c.n > 0) has_categories = true;
  if (has_categories) {
    out << "  -- by category --\n";
    for (const auto& [k, c] : report.by_category)
      if (k != "answerable") cell_row(out, k, c);
  }
  if (!report.by_generalization.empty()) {
    out << "  -- by generalization --\n";
    for (const auto& [k, c] : report.by_generalization) cell_row(out, k, c);
  }
  if (!report.error_counts.empty()) {
    out << "  -- errors --\n";
    for (const auto& [k, n] : report.error_counts) out << "  " << k << ": " << n << '\n';
  }
  return out.str();
}

std::map<std::string, AblationResult> run_ablation(const std::vector<QAExample>& examples,
                                                   const KnowledgeBase& kb,
                                                   const PipelineComponents& comps,
                                                   const PipelineConfig& cfg,
                                                   const std::vector<std::string>& toggles) {
  std::vector<std::pair<std::string, AblationToggles>> runs;
  runs.emplace_back("full", AblationToggles{});
  for (const auto& name : toggles) {
    AblationToggles t;
    if (name == "lfr")
      t.lfr = true;
    else if (name == "lfi")
      t.lfi = true;
    else if (name == "sgsr")
      t.sgsr = true;
    else if (name == "egc")
      t.egc = true;
    else
      throw std::invalid_argument("run_ablation: unknown toggle '" + name + "'");
    runs.emplace_back(name, t);
  }

  AliasLexicon lexicon = AliasLexicon::build(kb);
  std::map<std::string, AblationResult> out;
  for (const auto& [name, t] : runs) {
    PipelineConfig run_cfg = cfg;
    run_cfg.toggles = t;

    std::vector<RunRecord> records = run_pipeline(examples, kb, comps, run_cfg);
    std::vector<Prediction> preds;
    preds.reserve(records.size());
    for (auto& r : records) preds.push_back(r.prediction);

    AblationResult result;
    result.report = evaluate_dataset(preds, examples);
    size_t covered = 0, with_gold = 0;
    for (size_t i = 0; i < examples.size(); ++i) {
      if (!examples[i].gold_lf) continue;
      ++with_gold;
      if (preds[i].gold_in_candidates.value_or(false)) ++covered;
    }
    result.coverage_n = with_gold;
    result.coverage =
        with_gold == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(with_gold);
    out.emplace(name, std::move(result));
  }
  return out;
}

}  // namespace retina
