#pragma once

#include <string>
#include <vector>

#include "retina/config.hpp"
#include "retina/discriminator.hpp"
#include "retina/qa.hpp"

namespace retina {

// Builders for the per-component training sets. NK-labeled questions carry
// no gold form and are skipped everywhere; they only enter threshold tuning.

// Contrastive over path-enumerated candidates; questions whose gold form is
// not among the enumerated candidates are skipped.
TrainData build_retriever_training(const std::vector<QAExample>& examples,
                                   const KnowledgeBase& kb, const PipelineConfig& cfg);

// Contrastive over the assembled candidate pool produced with the given
// upstream components.
TrainData build_discriminator_training(const std::vector<QAExample>& examples,
                                       const KnowledgeBase& kb,
                                       const PipelineComponents& upstream,
                                       const PipelineConfig& cfg);

// Multiclass over the sketch inventory; the gold class is the gold form's
// sketch key.
TrainData build_sketch_training(const std::vector<QAExample>& examples,
                                const SketchInventory& inventory);

// Binary sentence-pair data over schema element labels; gold elements are
// positives, every other element of the same kind is a negative.
TrainData build_schema_training(const std::vector<QAExample>& examples, const KnowledgeBase& kb,
                                bool relations);

// Sketch inventory from the gold forms of the training split.
SketchInventory inventory_from_examples(const std::vector<QAExample>& examples);

// Dev-set threshold points: one (top score, credit-if-kept, credit-if-NK)
// triple per question with a non-empty candidate pool, using exact-match
// credit. Questions with empty pools are NK at any tau and carry no score.
std::vector<ThresholdPoint> threshold_points(const std::vector<QAExample>& examples,
                                             const KnowledgeBase& kb,
                                             const PipelineComponents& comps,
                                             const PipelineConfig& cfg);

}  // namespace retina
