#include "retina/training.hpp"

#include <algorithm>

namespace retina {

namespace {

Featurizer featurizer;

// Gold + negatives from a candidate pool; nullopt when the gold is absent
// or there are no negatives to contrast with.
std::optional<ContrastiveExample> contrastive_from_pool(
    const QAExample& ex, const std::vector<CandidateLogicalForm>& pool,
    const KnowledgeBase& kb) {
  if (!ex.gold_lf) return std::nullopt;
  std::string gold_key = canonical_key(ex.gold_lf);
  ContrastiveExample out;
  bool found = false;
  for (const auto& c : pool) {
    ScoreItem item = lf_score_item(c, kb);
    FeatureVector f = featurizer.features(ex.question, item.text, item.flags);
    if (c.key == gold_key) {
      out.gold = std::move(f);
      found = true;
    } else {
      out.negatives.push_back(std::move(f));
    }
  }
  if (!found || out.negatives.empty()) return std::nullopt;
  return out;
}

}  // namespace

TrainData build_retriever_training(const std::vector<QAExample>& examples,
                                   const KnowledgeBase& kb, const PipelineConfig& cfg) {
  TrainData data;
  data.objective = Objective::Contrastive;
  AliasLexicon lexicon = AliasLexicon::build(kb);
  for (const auto& ex : examples) {
    if (!ex.gold_lf) continue;
    LinkedEntities linked = link_entities(ex.question, kb, lexicon, cfg.linker_top_k);
    std::vector<KBPath> paths = enumerate_paths(kb, linked, cfg.retriever);
    std::vector<CandidateLogicalForm> candidates = paths_to_logical_forms(paths, kb);
    auto c = contrastive_from_pool(ex, candidates, kb);
    if (c) data.contrastive.push_back(std::move(*c));
  }
  return data;
}

TrainData build_discriminator_training(const std::vector<QAExample>& examples,
                                       const KnowledgeBase& kb,
                                       const PipelineComponents& upstream,
                                       const PipelineConfig& cfg) {
  TrainData data;
  data.objective = Objective::Contrastive;
  AliasLexicon lexicon = AliasLexicon::build(kb);
  for (const auto& ex : examples) {
    if (!ex.gold_lf) continue;
    StagedCandidates staged = enumerate_candidates(ex.question, kb, lexicon, upstream, cfg);
    auto c = contrastive_from_pool(ex, staged.pool, kb);
    if (c) data.contrastive.push_back(std::move(*c));
  }
  return data;
}

TrainData build_sketch_training(const std::vector<QAExample>& examples,
                                const SketchInventory& inventory) {
  TrainData data;
  data.objective = Objective::Multiclass;
  for (const auto& ex : examples) {
    if (!ex.gold_lf) continue;
    Sketch gold_sketch = extract_sketch(canonicalize(ex.gold_lf));
    gold_sketch.tree = canonicalize(gold_sketch.tree);
    std::string gold_key = gold_sketch.key();

    MulticlassExample mc;
    bool found = false;
    for (size_t i = 0; i < inventory.entries.size(); ++i) {
      const auto& entry = inventory.entries[i];
      ItemFlags flags = lf_flags(*entry.sketch.tree, CandidateSource::Constructed);
      flags.from_constructed = false;
      mc.class_features.push_back(featurizer.features(ex.question, entry.key, flags));
      if (entry.key == gold_key) {
        mc.gold_index = i;
        found = true;
      }
    }
    if (found && mc.class_features.size() > 1) data.multiclass.push_back(std::move(mc));
  }
  return data;
}

TrainData build_schema_training(const std::vector<QAExample>& examples, const KnowledgeBase& kb,
                                bool relations) {
  TrainData data;
  data.objective = Objective::Binary;
  for (const auto& ex : examples) {
    if (!ex.gold_lf) continue;
    SchemaUse use = collect_ids(*ex.gold_lf);
    if (relations) {
      for (const auto& [id, rel] : kb.relations()) {
        BinaryExample b;
        b.features = featurizer.features(ex.question, rel.label, {});
        b.label = use.relations.count(id) ? 1 : 0;
        data.binary.push_back(std::move(b));
      }
    } else {
      for (const auto& [id, type] : kb.types()) {
        BinaryExample b;
        b.features = featurizer.features(ex.question, type.label, {});
        b.label = use.types.count(id) ? 1 : 0;
        data.binary.push_back(std::move(b));
      }
    }
  }
  return data;
}

SketchInventory inventory_from_examples(const std::vector<QAExample>& examples) {
  std::vector<SExprPtr> lfs;
  for (const auto& ex : examples)
    if (ex.gold_lf) lfs.push_back(ex.gold_lf);
  return build_sketch_inventory(lfs);
}

std::vector<ThresholdPoint> threshold_points(const std::vector<QAExample>& examples,
                                             const KnowledgeBase& kb,
                                             const PipelineComponents& comps,
                                             const PipelineConfig& cfg) {
  std::vector<ThresholdPoint> points;
  AliasLexicon lexicon = AliasLexicon::build(kb);
  for (const auto& ex : examples) {
    StagedCandidates staged = enumerate_candidates(ex.question, kb, lexicon, comps, cfg);
    if (staged.pool.empty()) continue;
    std::string best_key;
    double best_score = 0.0;
    bool first = true;
    for (const auto& c : staged.pool) {
      double s = comps.discriminator_scorer->score_item(ex.question, lf_score_item(c, kb));
      if (first || s > best_score || (s == best_score && c.key < best_key)) {
        best_score = s;
        best_key = c.key;
        first = false;
      }
    }
    ThresholdPoint p;
    p.score = best_score;
    p.value_if_kept = ex.gold_lf && canonical_key(ex.gold_lf) == best_key ? 1.0 : 0.0;
    p.value_if_nk = ex.gold_is_nk() ? 1.0 : 0.0;
    points.push_back(p);
  }
  return points;
}

}  // namespace retina
