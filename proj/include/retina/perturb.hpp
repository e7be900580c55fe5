#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "retina/kb.hpp"
#include "retina/qa.hpp"

namespace retina {

// One schema/data element deletion. Targets are checked against the source
// KB; elements removed by an earlier cascade are skipped.
struct Deletion {
  enum class Kind { Type, Relation, Entity, Fact };
  Kind kind = Kind::Fact;
  std::string target;  // id for type/relation/entity
  Fact fact;           // for kind == Fact

  static Deletion of_type(std::string id) { return {Kind::Type, std::move(id), {}}; }
  static Deletion of_relation(std::string id) { return {Kind::Relation, std::move(id), {}}; }
  static Deletion of_entity(std::string id) { return {Kind::Entity, std::move(id), {}}; }
  static Deletion of_fact(Fact f) { return {Kind::Fact, "", std::move(f)}; }
};

struct PerturbationPlan {
  std::vector<Deletion> deletions;
  uint64_t seed = 0;
};

// JSON-lines, one deletion per line: {"kind": "...", "target": "..."} with a
// fact target given as [subject, relation, object-token].
PerturbationPlan load_plan(const std::string& path);
void save_plan(const PerturbationPlan& plan, const std::string& path);

struct PerturbResult {
  KbPtr kb;                        // reduced KB, a new value
  std::vector<QAExample> dataset;  // relabeled examples, input order
};

// Applies the plan with cascading deletion and relabels the dataset:
// schema gaps in the gold form become NK/NA, broken data paths keep the
// gold form with NA, untouched examples stay answerable. The pre-deletion
// answers are preserved in gold_answer_ideal. Every example must be
// answerable on the source KB.
PerturbResult perturb_kb(const KnowledgeBase& kb, const std::vector<QAExample>& dataset,
                         const PerturbationPlan& plan);

}  // namespace retina
