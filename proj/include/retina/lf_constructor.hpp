#pragma once

#include <string>
#include <vector>

#include "retina/entity_linker.hpp"
#include "retina/kb.hpp"
#include "retina/lf_retriever.hpp"
#include "retina/scorer.hpp"
#include "retina/sexpr.hpp"

namespace retina {

struct SketchBeamEntry {
  Sketch sketch;
  double score = 0.0;
};

// Candidate sketches in descending score order; literal slots already
// instantiated from the question.
struct SketchBeam {
  std::vector<SketchBeamEntry> entries;
  bool empty() const { return entries.empty(); }
};

struct ScoredId {
  std::string id;
  double score = 0.0;
};

struct SchemaCandidates {
  std::vector<ScoredId> types;
  std::vector<ScoredId> relations;
};

struct ConstructorConfig {
  int beam = 10;
  int schema_top_k = 10;
  int max_groundings = 5000;
  bool check_groundings = true;  // off under the -LFI ablation
};

// Ranks every inventory entry against the question and keeps the top beam;
// number-literal slots are filled with the question's numeric tokens in
// order, and sketches needing more numbers than the question has are
// dropped.
SketchBeam generate_sketches(const std::string& question, const SketchInventory& inventory,
                             const Scorer& ranker, int beam);

// Scores every type and relation label against the question; top k per kind,
// ties broken by ascending id.
SchemaCandidates retrieve_schema(const std::string& question, const KnowledgeBase& kb,
                                 const Scorer& type_scorer, const Scorer& relation_scorer,
                                 int k);

// Grounds every sketch with every combination of candidate types, candidate
// relations, and linked entities, keeping type-valid groundings. Pure;
// memoizes sub-tree typing per invocation; deterministic order (sketch rank,
// then lexicographic slot assignment), capped at max_groundings.
std::vector<CandidateLogicalForm> integrate(const SketchBeam& sketches,
                                            const SchemaCandidates& schema,
                                            const LinkedEntities& linked,
                                            const KnowledgeBase& kb,
                                            const ConstructorConfig& cfg = {});

// Numeric tokens of the question in order of appearance.
std::vector<Literal> question_numbers(const std::string& question);

}  // namespace retina
