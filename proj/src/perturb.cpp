#include "retina/perturb.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "retina/errors.hpp"
#include "retina/executor.hpp"

namespace retina {

using nlohmann::json;

namespace {

const char* kind_name(Deletion::Kind k) {
  switch (k) {
    case Deletion::Kind::Type: return "type";
    case Deletion::Kind::Relation: return "relation";
    case Deletion::Kind::Entity: return "entity";
    case Deletion::Kind::Fact: return "fact";
  }
  return "?";
}

// Mutable working copy of a KB with cascading removal.
struct Shrinker {
  std::map<std::string, TypeDef> types;
  std::map<std::string, RelationDef> relations;
  std::map<std::string, EntityDef> entities;
  std::set<Fact> facts;

  explicit Shrinker(const KnowledgeBase& kb)
      : types(kb.types()), relations(kb.relations()), entities(kb.entities()) {
    facts.insert(kb.facts().begin(), kb.facts().end());
  }

  void drop_fact(const Fact& f) { facts.erase(f); }

  void drop_relation(const std::string& id) {
    if (relations.erase(id) == 0) return;
    for (auto it = facts.begin(); it != facts.end();)
      it = it->relation == id ? facts.erase(it) : std::next(it);
  }

  void drop_entity(const std::string& id) {
    if (entities.erase(id) == 0) return;
    for (auto it = facts.begin(); it != facts.end();) {
      bool hit = it->subject == id ||
                 (it->object.is_entity() && it->object.entity_id == id);
      it = hit ? facts.erase(it) : std::next(it);
    }
  }

  void drop_type(const std::string& id) {
    if (types.erase(id) == 0) return;
    std::vector<std::string> dead_relations;
    for (const auto& [rid, r] : relations)
      if (r.domain == id || (r.range.is_type() && r.range.type_id == id))
        dead_relations.push_back(rid);
    for (const auto& rid : dead_relations) drop_relation(rid);
    std::vector<std::string> dead_entities;
    for (auto& [eid, e] : entities) {
      e.types.erase(id);
      if (e.types.empty()) dead_entities.push_back(eid);
    }
    for (const auto& eid : dead_entities) drop_entity(eid);
  }

  void apply(const Deletion& d) {
    switch (d.kind) {
      case Deletion::Kind::Type: drop_type(d.target); break;
      case Deletion::Kind::Relation: drop_relation(d.target); break;
      case Deletion::Kind::Entity: drop_entity(d.target); break;
      case Deletion::Kind::Fact: drop_fact(d.fact); break;
    }
  }

  KbPtr build() const {
    KbData data;
    for (const auto& [_, t] : types) data.types.push_back(t);
    for (const auto& [_, r] : relations) data.relations.push_back(r);
    for (const auto& [_, e] : entities) data.entities.push_back(e);
    data.facts.assign(facts.begin(), facts.end());
    return KnowledgeBase::build(std::move(data));
  }
};

void check_target_exists(const KnowledgeBase& kb, const Deletion& d) {
  bool ok = false;
  switch (d.kind) {
    case Deletion::Kind::Type: ok = kb.has_type(d.target); break;
    case Deletion::Kind::Relation: ok = kb.has_relation(d.target); break;
    case Deletion::Kind::Entity: ok = kb.has_entity(d.target); break;
    case Deletion::Kind::Fact:
      ok = std::binary_search(kb.facts().begin(), kb.facts().end(), d.fact);
      break;
  }
  if (!ok) {
    std::string what = d.kind == Deletion::Kind::Fact
                           ? "(" + d.fact.subject + ", " + d.fact.relation + ", " +
                                 d.fact.object.token() + ")"
                           : d.target;
    throw DataError(std::string("perturbation plan: ") + kind_name(d.kind) + " " + what +
                    " does not exist in the source KB");
  }
}

template <typename K, typename V>
std::set<K> removed_keys(const std::map<K, V>& before, const std::map<K, V>& after) {
  std::set<K> out;
  for (const auto& [k, _] : before)
    if (after.find(k) == after.end()) out.insert(k);
  return out;
}

}  // namespace

PerturbResult perturb_kb(const KnowledgeBase& kb, const std::vector<QAExample>& dataset,
                         const PerturbationPlan& plan) {
  for (const auto& d : plan.deletions) check_target_exists(kb, d);

  // precondition: every example answerable on the source KB
  std::vector<AnswerSet> source_answers;
  source_answers.reserve(dataset.size());
  for (const auto& ex : dataset) {
    if (ex.gold_is_nk())
      throw std::invalid_argument("perturb_kb: example " + ex.qid + " has no gold logical form");
    TypingResult t = check_validity(ex.gold_lf, kb);
    if (!t.valid)
      throw std::invalid_argument("perturb_kb: example " + ex.qid +
                                  " is invalid on the source KB: " + t.failure->rule);
    AnswerSet a = execute(ex.gold_lf, kb);
    if (a.empty())
      throw std::invalid_argument("perturb_kb: example " + ex.qid +
                                  " executes to the empty set on the source KB");
    source_answers.push_back(std::move(a));
  }

  Shrinker shrinker(kb);
  for (const auto& d : plan.deletions) shrinker.apply(d);
  KbPtr reduced = shrinker.build();

  // entity deletions alone, for attributing empty answers to missing-other-entity
  Shrinker entity_only(kb);
  for (const auto& d : plan.deletions)
    if (d.kind == Deletion::Kind::Entity) entity_only.apply(d);
  KbPtr entity_reduced = entity_only.build();

  std::set<std::string> gone_types = removed_keys(kb.types(), reduced->types());
  std::set<std::string> gone_relations = removed_keys(kb.relations(), reduced->relations());
  std::set<std::string> gone_entities = removed_keys(kb.entities(), reduced->entities());

  auto intersects = [](const std::set<std::string>& a, const std::set<std::string>& b) {
    for (const auto& x : a)
      if (b.count(x)) return true;
    return false;
  };

  PerturbResult result;
  result.kb = reduced;
  result.dataset.reserve(dataset.size());
  for (size_t i = 0; i < dataset.size(); ++i) {
    QAExample ex = dataset[i];
    ex.gold_answer_ideal = source_answers[i];
    SchemaUse use = collect_ids(*ex.gold_lf);
    if (intersects(use.types, gone_types)) {
      ex.gold_lf = nullptr;
      ex.gold_answer = std::nullopt;
      ex.category = Category::MissingType;
    } else if (intersects(use.relations, gone_relations)) {
      ex.gold_lf = nullptr;
      ex.gold_answer = std::nullopt;
      ex.category = Category::MissingRelation;
    } else if (intersects(use.entities, gone_entities)) {
      ex.gold_lf = nullptr;
      ex.gold_answer = std::nullopt;
      ex.category = Category::MissingMentionEntity;
    } else {
      AnswerSet now = execute(ex.gold_lf, *reduced);
      if (!now.empty()) {
        ex.gold_answer = std::move(now);
        ex.category = Category::Answerable;
      } else {
        ex.gold_answer = std::nullopt;
        bool broken_by_entities = execute(ex.gold_lf, *entity_reduced).empty();
        ex.category =
            broken_by_entities ? Category::MissingOtherEntity : Category::MissingFact;
      }
    }
    result.dataset.push_back(std::move(ex));
  }
  return result;
}

PerturbationPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open");
  PerturbationPlan plan;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::string where = path + ":" + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
    Deletion d;
    std::string kind;
    try {
      kind = j.at("kind").get<std::string>();
    } catch (const json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
    if (kind == "type" || kind == "relation" || kind == "entity") {
      d.kind = kind == "type"       ? Deletion::Kind::Type
               : kind == "relation" ? Deletion::Kind::Relation
                                    : Deletion::Kind::Entity;
      if (!j.at("target").is_string())
        throw DataError(where + ": target must be a string for kind " + kind);
      d.target = j.at("target").get<std::string>();
    } else if (kind == "fact") {
      d.kind = Deletion::Kind::Fact;
      const auto& t = j.at("target");
      if (!t.is_array() || t.size() != 3)
        throw DataError(where + ": fact target must be [subject, relation, object]");
      d.fact.subject = t[0].get<std::string>();
      d.fact.relation = t[1].get<std::string>();
      d.fact.object = Object::from_token(t[2].get<std::string>());
    } else {
      throw DataError(where + ": unknown deletion kind '" + kind + "'");
    }
    plan.deletions.push_back(std::move(d));
  }
  return plan;
}

void save_plan(const PerturbationPlan& plan, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(path + ": cannot open for writing");
  for (const auto& d : plan.deletions) {
    json j;
    j["kind"] = kind_name(d.kind);
    if (d.kind == Deletion::Kind::Fact)
      j["target"] = json::array({d.fact.subject, d.fact.relation, d.fact.object.token()});
    else
      j["target"] = d.target;
    out << j.dump() << '\n';
  }
}

}  // namespace retina
