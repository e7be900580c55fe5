#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "retina/decimal.hpp"
#include "retina/errors.hpp"

namespace retina {

enum class LitKind { Number, String };

// A literal value with canonical text (numbers are normalized decimals).
struct Literal {
  LitKind kind = LitKind::String;
  std::string text;

  static Literal number(const Decimal& d) { return {LitKind::Number, d.str()}; }
  static Literal string(std::string s) { return {LitKind::String, std::move(s)}; }
  Decimal as_decimal() const { return *Decimal::parse(text); }

  bool operator==(const Literal& o) const { return kind == o.kind && text == o.text; }
  bool operator!=(const Literal& o) const { return !(*this == o); }
};

struct TypeDef {
  std::string id;
  std::string label;
};

// Relation range: an entity type or a literal kind.
struct RangeRef {
  enum class Kind { EntityType, Number, String };
  Kind kind = Kind::EntityType;
  std::string type_id;  // set when kind == EntityType

  bool is_type() const { return kind == Kind::EntityType; }
  bool operator==(const RangeRef& o) const { return kind == o.kind && type_id == o.type_id; }
};

struct RelationDef {
  std::string id;
  std::string label;
  std::string domain;  // type id
  RangeRef range;
};

struct EntityDef {
  std::string id;
  std::string label;
  std::set<std::string> types;  // non-empty
  std::vector<std::string> aliases;
};

// Fact object: an entity id or a literal.
struct Object {
  enum class Kind { Entity, Literal };
  Kind kind = Kind::Entity;
  std::string entity_id;
  Literal lit;

  static Object entity(std::string id) {
    Object o;
    o.kind = Kind::Entity;
    o.entity_id = std::move(id);
    return o;
  }
  static Object literal(Literal l) {
    Object o;
    o.kind = Kind::Literal;
    o.lit = std::move(l);
    return o;
  }
  bool is_entity() const { return kind == Kind::Entity; }
  // Canonical token as it appears in facts.tsv and in perturbation plans.
  std::string token() const;
  // Parses "number:<decimal>" / "string:<text>" / bare entity id.
  static Object from_token(const std::string& token);

  bool operator==(const Object& o) const;
  bool operator<(const Object& o) const { return token() < o.token(); }
};

struct Fact {
  std::string subject;
  std::string relation;
  Object object;

  bool operator==(const Fact& o) const {
    return subject == o.subject && relation == o.relation && object == o.object;
  }
  bool operator<(const Fact& o) const;
};

// Raw KB content before validation. load_kb parses into this; validate_kb
// checks it; KnowledgeBase::build indexes a valid one.
struct KbData {
  std::vector<TypeDef> types;
  std::vector<RelationDef> relations;
  std::vector<EntityDef> entities;
  std::vector<Fact> facts;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Lists every violated invariant (uniqueness, referential integrity,
// fact typing, duplicates). Empty report for anything load_kb accepts.
ValidationReport validate_kb(const KbData& data);

enum class IdKind { Type, Entity, Relation, Unknown };
using IdClassifier = std::function<IdKind(const std::string&)>;

// Immutable, validated knowledge base with adjacency indexes.
class KnowledgeBase {
 public:
  // Throws IntegrityError naming the first violation.
  static std::shared_ptr<const KnowledgeBase> build(KbData data);

  const std::map<std::string, TypeDef>& types() const { return types_; }
  const std::map<std::string, RelationDef>& relations() const { return relations_; }
  const std::map<std::string, EntityDef>& entities() const { return entities_; }
  const std::vector<Fact>& facts() const { return facts_; }

  bool has_type(const std::string& id) const { return types_.count(id) > 0; }
  bool has_relation(const std::string& id) const { return relations_.count(id) > 0; }
  bool has_entity(const std::string& id) const { return entities_.count(id) > 0; }
  const RelationDef* relation(const std::string& id) const;
  const EntityDef* entity(const std::string& id) const;
  const TypeDef* type(const std::string& id) const;

  // Entities carrying the given type, ascending id order.
  const std::set<std::string>& instances_of(const std::string& type_id) const;

  const std::vector<const Fact*>& facts_by_subject(const std::string& entity_id) const;
  const std::vector<const Fact*>& facts_by_object_entity(const std::string& entity_id) const;
  const std::vector<const Fact*>& facts_by_relation(const std::string& relation_id) const;

  // Number of facts the entity participates in (subject or object side).
  size_t fact_degree(const std::string& entity_id) const;

  // Classifies an identifier as type / entity / relation (types win on the
  // unlikely cross-kind collision).
  IdClassifier id_classifier() const;

  KbData to_data() const;

 private:
  KnowledgeBase() = default;

  std::map<std::string, TypeDef> types_;
  std::map<std::string, RelationDef> relations_;
  std::map<std::string, EntityDef> entities_;
  std::vector<Fact> facts_;  // sorted, unique

  std::map<std::string, std::set<std::string>> instances_;
  std::map<std::string, std::vector<const Fact*>> by_subject_;
  std::map<std::string, std::vector<const Fact*>> by_object_;
  std::map<std::string, std::vector<const Fact*>> by_relation_;
};

using KbPtr = std::shared_ptr<const KnowledgeBase>;

// TSV loading. Files: types.tsv, relations.tsv, entities.tsv, facts.tsv
// inside kb_dir. UTF-8, tab-separated, '#' comment lines ignored.
// Throws DataError with file+line on parse errors, IntegrityError on
// invariant violations.
KbPtr load_kb(const std::string& kb_dir);
KbData load_kb_data(const std::string& kb_dir);

// Writes the four TSV files into kb_dir (creating it if needed).
void save_kb(const KnowledgeBase& kb, const std::string& kb_dir);

}  // namespace retina
