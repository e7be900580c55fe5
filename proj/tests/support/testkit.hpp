#pragma once

// Shared fixtures for the test suites: the two-fact toy KB, random KB and
// random well-typed expression generators, and an index-free brute-force
// executor used as the independent oracle.

#include <random>
#include <string>
#include <vector>

#include "retina/executor.hpp"
#include "retina/kb.hpp"
#include "retina/sexpr.hpp"

namespace retina::testkit {

// researcher / university / city; works_at, located_in; C. Manning,
// Stanford, Palo Alto; two facts.
KbData toy_kb_data();
KbPtr toy_kb();

struct RandomKbConfig {
  int n_types = 4;
  int n_relations = 6;
  int n_entities = 20;
  int n_facts = 40;
  uint64_t seed = 1;
};

KbPtr random_kb(const RandomKbConfig& cfg);

// Generates an expression that passes check_validity on the KB, with tree
// depth bounded by max_depth. Literal-kinded and COUNT roots included.
SExprPtr random_valid_expr(const KnowledgeBase& kb, std::mt19937_64& rng, int max_depth);

// Entity-kinded expression whose static kind contains target_type.
SExprPtr random_entity_expr(const KnowledgeBase& kb, std::mt19937_64& rng,
                            const std::string& target_type, int max_depth);

// Index-free re-derivation of the denotational semantics: every node scans
// the flat fact/entity lists directly. Independent of retina::execute.
AnswerSet oracle_execute(const SExpr& expr, const KnowledgeBase& kb);

// Unique temporary directory under the system temp root; caller owns cleanup
// (or leaves it to the OS).
std::string make_temp_dir(const std::string& prefix);

}  // namespace retina::testkit
