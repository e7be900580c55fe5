#include "retina/kb.hpp"

#include <algorithm>
#include <set>

namespace retina {

std::string Object::token() const {
  if (kind == Kind::Entity) return entity_id;
  if (lit.kind == LitKind::Number) return "number:" + lit.text;
  return "string:" + lit.text;
}

Object Object::from_token(const std::string& token) {
  if (token.rfind("number:", 0) == 0) {
    auto d = Decimal::parse(token.substr(7));
    if (!d) throw DataError("invalid number literal: " + token);
    return literal(Literal::number(*d));
  }
  if (token.rfind("string:", 0) == 0) {
    return literal(Literal::string(token.substr(7)));
  }
  return entity(token);
}

bool Object::operator==(const Object& o) const {
  if (kind != o.kind) return false;
  if (kind == Kind::Entity) return entity_id == o.entity_id;
  return lit == o.lit;
}

bool Fact::operator<(const Fact& o) const {
  if (subject != o.subject) return subject < o.subject;
  if (relation != o.relation) return relation < o.relation;
  return object < o.object;
}

namespace {

void check_fact(const Fact& f, const std::map<std::string, RelationDef>& relations,
                const std::map<std::string, EntityDef>& entities,
                std::vector<std::string>& out) {
  auto fact_name = [&f] { return "(" + f.subject + ", " + f.relation + ", " + f.object.token() + ")"; };
  auto se = entities.find(f.subject);
  if (se == entities.end()) {
    out.push_back("fact " + fact_name() + ": dangling subject '" + f.subject + "'");
    return;
  }
  auto re = relations.find(f.relation);
  if (re == relations.end()) {
    out.push_back("fact " + fact_name() + ": dangling relation '" + f.relation + "'");
    return;
  }
  const RelationDef& rel = re->second;
  if (se->second.types.count(rel.domain) == 0) {
    out.push_back("fact " + fact_name() + ": subject '" + f.subject +
                  "' lacks domain type '" + rel.domain + "'");
  }
  if (rel.range.is_type()) {
    if (!f.object.is_entity()) {
      out.push_back("fact " + fact_name() + ": literal object for entity-ranged relation");
    } else {
      auto oe = entities.find(f.object.entity_id);
      if (oe == entities.end()) {
        out.push_back("fact " + fact_name() + ": dangling object '" + f.object.entity_id + "'");
      } else if (oe->second.types.count(rel.range.type_id) == 0) {
        out.push_back("fact " + fact_name() + ": object '" + f.object.entity_id +
                      "' lacks range type '" + rel.range.type_id + "'");
      }
    }
  } else {
    LitKind want = rel.range.kind == RangeRef::Kind::Number ? LitKind::Number : LitKind::String;
    if (f.object.is_entity() || f.object.lit.kind != want) {
      out.push_back("fact " + fact_name() + ": object kind does not match relation range");
    }
  }
}

}  // namespace

ValidationReport validate_kb(const KbData& data) {
  ValidationReport report;
  auto& out = report.violations;

  std::map<std::string, TypeDef> types;
  for (const auto& t : data.types) {
    if (t.id.empty()) out.push_back("type with empty id");
    if (t.label.empty()) out.push_back("type '" + t.id + "' with empty label");
    if (!types.emplace(t.id, t).second) out.push_back("duplicate type id '" + t.id + "'");
  }
  std::map<std::string, RelationDef> relations;
  for (const auto& r : data.relations) {
    if (r.id.empty()) out.push_back("relation with empty id");
    if (!relations.emplace(r.id, r).second) out.push_back("duplicate relation id '" + r.id + "'");
    if (types.count(r.domain) == 0)
      out.push_back("relation '" + r.id + "': unknown domain type '" + r.domain + "'");
    if (r.range.is_type() && types.count(r.range.type_id) == 0)
      out.push_back("relation '" + r.id + "': unknown range type '" + r.range.type_id + "'");
  }
  std::map<std::string, EntityDef> entities;
  for (const auto& e : data.entities) {
    if (e.id.empty()) out.push_back("entity with empty id");
    if (!entities.emplace(e.id, e).second) out.push_back("duplicate entity id '" + e.id + "'");
    if (e.types.empty()) out.push_back("entity '" + e.id + "' has no types");
    for (const auto& t : e.types)
      if (types.count(t) == 0)
        out.push_back("entity '" + e.id + "': unknown type '" + t + "'");
  }
  std::set<Fact> seen;
  for (const auto& f : data.facts) {
    if (!seen.insert(f).second) {
      out.push_back("duplicate fact (" + f.subject + ", " + f.relation + ", " +
                    f.object.token() + ")");
      continue;
    }
    check_fact(f, relations, entities, out);
  }
  return report;
}

KbPtr KnowledgeBase::build(KbData data) {
  ValidationReport report = validate_kb(data);
  if (!report.ok()) throw IntegrityError("invalid knowledge base: " + report.violations.front());

  auto kb = std::shared_ptr<KnowledgeBase>(new KnowledgeBase());
  for (auto& t : data.types) kb->types_.emplace(t.id, std::move(t));
  for (auto& r : data.relations) kb->relations_.emplace(r.id, std::move(r));
  for (auto& e : data.entities) kb->entities_.emplace(e.id, std::move(e));
  kb->facts_ = std::move(data.facts);
  std::sort(kb->facts_.begin(), kb->facts_.end());

  for (const auto& [id, e] : kb->entities_)
    for (const auto& t : e.types) kb->instances_[t].insert(id);
  for (const auto& f : kb->facts_) {
    kb->by_subject_[f.subject].push_back(&f);
    kb->by_relation_[f.relation].push_back(&f);
    if (f.object.is_entity()) kb->by_object_[f.object.entity_id].push_back(&f);
  }
  return kb;
}

const RelationDef* KnowledgeBase::relation(const std::string& id) const {
  auto it = relations_.find(id);
  return it == relations_.end() ? nullptr : &it->second;
}

const EntityDef* KnowledgeBase::entity(const std::string& id) const {
  auto it = entities_.find(id);
  return it == entities_.end() ? nullptr : &it->second;
}

const TypeDef* KnowledgeBase::type(const std::string& id) const {
  auto it = types_.find(id);
  return it == types_.end() ? nullptr : &it->second;
}

namespace {
const std::set<std::string> kEmptyIdSet;
const std::vector<const Fact*> kEmptyFacts;
}  // namespace

const std::set<std::string>& KnowledgeBase::instances_of(const std::string& type_id) const {
  auto it = instances_.find(type_id);
  return it == instances_.end() ? kEmptyIdSet : it->second;
}

const std::vector<const Fact*>& KnowledgeBase::facts_by_subject(const std::string& entity_id) const {
  auto it = by_subject_.find(entity_id);
  return it == by_subject_.end() ? kEmptyFacts : it->second;
}

const std::vector<const Fact*>& KnowledgeBase::facts_by_object_entity(
    const std::string& entity_id) const {
  auto it = by_object_.find(entity_id);
  return it == by_object_.end() ? kEmptyFacts : it->second;
}

const std::vector<const Fact*>& KnowledgeBase::facts_by_relation(
    const std::string& relation_id) const {
  auto it = by_relation_.find(relation_id);
  return it == by_relation_.end() ? kEmptyFacts : it->second;
}

size_t KnowledgeBase::fact_degree(const std::string& entity_id) const {
  return facts_by_subject(entity_id).size() + facts_by_object_entity(entity_id).size();
}

IdClassifier KnowledgeBase::id_classifier() const {
  return [this](const std::string& id) {
    if (types_.count(id)) return IdKind::Type;
    if (entities_.count(id)) return IdKind::Entity;
    if (relations_.count(id)) return IdKind::Relation;
    return IdKind::Unknown;
  };
}

KbData KnowledgeBase::to_data() const {
  KbData data;
  for (const auto& [_, t] : types_) data.types.push_back(t);
  for (const auto& [_, r] : relations_) data.relations.push_back(r);
  for (const auto& [_, e] : entities_) data.entities.push_back(e);
  data.facts = facts_;
  return data;
}

}  // namespace retina
