#pragma once

#include <optional>
#include <string>
#include <vector>

#include "retina/entity_linker.hpp"
#include "retina/kb.hpp"
#include "retina/scorer.hpp"
#include "retina/sexpr.hpp"

namespace retina {

// One traversal step; forward follows facts with the current frontier on the
// subject side, inverse on the object side.
struct PathStep {
  std::string relation;
  bool forward = true;

  bool operator==(const PathStep& o) const {
    return relation == o.relation && forward == o.forward;
  }
};

// A fact-realized KB path of at most two hops from a linked entity; for
// two-entity questions a second anchor constrains the same terminal variable.
struct KBPath {
  std::string anchor;
  std::vector<PathStep> steps;
  struct Constraint {
    std::string anchor;
    PathStep step;
  };
  std::optional<Constraint> constraint;
};

enum class CandidateSource { Retrieved, Constructed, Both };

const char* candidate_source_name(CandidateSource s);

// A candidate logical form: canonical expression, provenance, and an
// optional score. Every candidate passes check_validity on its KB.
struct CandidateLogicalForm {
  SExprPtr expr;
  std::string key;  // canonical print
  CandidateSource source = CandidateSource::Retrieved;
  std::optional<double> score;
};

struct RetrieverConfig {
  int top_k = 10;
  int max_paths = 2000;
};

// All realized 1- and 2-hop paths from each linked entity, both directions
// per hop; for exactly two linked entities also the shared-terminal
// conjunctions. Deterministic order, capped at max_paths.
std::vector<KBPath> enumerate_paths(const KnowledgeBase& kb, const LinkedEntities& linked,
                                    const RetrieverConfig& cfg = {});

// Transforms paths into candidates: the bare join chain, one (AND t chain)
// per terminal type t, and COUNT wrappers of both. Canonicalized,
// deduplicated, type-checked.
std::vector<CandidateLogicalForm> paths_to_logical_forms(const std::vector<KBPath>& paths,
                                                         const KnowledgeBase& kb);

// Scores candidates against the question and keeps the top k (score
// descending, canonical print ascending on ties).
std::vector<CandidateLogicalForm> rank_retrieved(const std::string& question,
                                                 std::vector<CandidateLogicalForm> candidates,
                                                 const Scorer& scorer, const KnowledgeBase& kb,
                                                 int k);

// Textual view of a logical form for scorers: ids replaced by labels,
// structure tokens kept.
std::string lf_surface_text(const SExpr& expr, const KnowledgeBase& kb);

ItemFlags lf_flags(const SExpr& expr, CandidateSource source);
ScoreItem lf_score_item(const CandidateLogicalForm& c, const KnowledgeBase& kb);

// Canonicalizes and type-checks; nullopt when the grounding is not valid.
std::optional<CandidateLogicalForm> make_candidate(const SExprPtr& expr, CandidateSource source,
                                                   const KnowledgeBase& kb);

}  // namespace retina
