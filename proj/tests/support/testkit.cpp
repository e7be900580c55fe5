#include "testkit.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <set>

namespace retina::testkit {

KbData toy_kb_data() {
  KbData d;
  d.types = {{"researcher", "researcher"}, {"university", "university"}, {"city", "city"}};
  d.relations = {
      {"works_at", "works at", "researcher", {RangeRef::Kind::EntityType, "university"}},
      {"located_in", "located in", "university", {RangeRef::Kind::EntityType, "city"}},
  };
  d.entities = {
      {"c_manning", "C. Manning", {"researcher"}, {"c. manning", "manning"}},
      {"stanford", "Stanford", {"university"}, {"stanford", "stanford university"}},
      {"palo_alto", "Palo Alto", {"city"}, {"palo alto"}},
  };
  d.facts = {
      {"c_manning", "works_at", Object::entity("stanford")},
      {"stanford", "located_in", Object::entity("palo_alto")},
  };
  return d;
}

KbPtr toy_kb() { return KnowledgeBase::build(toy_kb_data()); }

KbPtr random_kb(const RandomKbConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  auto pick = [&rng](size_t n) { return static_cast<size_t>(rng() % n); };

  KbData d;
  for (int i = 0; i < cfg.n_types; ++i) {
    std::string id = "t" + std::to_string(i);
    d.types.push_back({id, "type " + std::to_string(i)});
  }
  for (int i = 0; i < cfg.n_relations; ++i) {
    std::string id = "r" + std::to_string(i);
    RelationDef r;
    r.id = id;
    r.label = "relation " + std::to_string(i);
    r.domain = d.types[pick(d.types.size())].id;
    // keep at least one numeric relation so superlatives/comparatives are live
    if (i == 0 || rng() % 10 < 3) {
      r.range = {RangeRef::Kind::Number, ""};
    } else {
      r.range = {RangeRef::Kind::EntityType, d.types[pick(d.types.size())].id};
    }
    d.relations.push_back(std::move(r));
  }
  for (int i = 0; i < cfg.n_entities; ++i) {
    EntityDef e;
    e.id = "e" + std::to_string(i);
    e.label = "entity " + std::to_string(i);
    e.types.insert(d.types[pick(d.types.size())].id);
    if (rng() % 3 == 0) e.types.insert(d.types[pick(d.types.size())].id);
    e.aliases = {e.label};
    d.entities.push_back(std::move(e));
  }

  std::set<std::string> instances_by_type[64];
  for (const auto& e : d.entities)
    for (const auto& t : e.types)
      for (size_t ti = 0; ti < d.types.size(); ++ti)
        if (d.types[ti].id == t) instances_by_type[ti].insert(e.id);

  std::set<Fact> facts;
  for (int i = 0; i < cfg.n_facts * 4 && static_cast<int>(facts.size()) < cfg.n_facts; ++i) {
    const RelationDef& r = d.relations[pick(d.relations.size())];
    size_t dom_idx = 0;
    for (size_t ti = 0; ti < d.types.size(); ++ti)
      if (d.types[ti].id == r.domain) dom_idx = ti;
    const auto& subjects = instances_by_type[dom_idx];
    if (subjects.empty()) continue;
    auto sit = subjects.begin();
    std::advance(sit, pick(subjects.size()));
    Object obj;
    if (r.range.is_type()) {
      size_t rng_idx = 0;
      for (size_t ti = 0; ti < d.types.size(); ++ti)
        if (d.types[ti].id == r.range.type_id) rng_idx = ti;
      const auto& objects = instances_by_type[rng_idx];
      if (objects.empty()) continue;
      auto oit = objects.begin();
      std::advance(oit, pick(objects.size()));
      obj = Object::entity(*oit);
    } else {
      obj = Object::literal(Literal::number(Decimal::from_int(static_cast<long long>(rng() % 200))));
    }
    facts.insert({*sit, r.id, obj});
  }
  d.facts.assign(facts.begin(), facts.end());
  return KnowledgeBase::build(std::move(d));
}

namespace {

std::vector<const RelationDef*> relations_with_domain(const KnowledgeBase& kb,
                                                      const std::string& type_id,
                                                      bool numeric_only) {
  std::vector<const RelationDef*> out;
  for (const auto& [_, r] : kb.relations())
    if (r.domain == type_id && (!numeric_only || r.range.kind == RangeRef::Kind::Number))
      out.push_back(&r);
  return out;
}

std::vector<const RelationDef*> relations_with_range_type(const KnowledgeBase& kb,
                                                          const std::string& type_id) {
  std::vector<const RelationDef*> out;
  for (const auto& [_, r] : kb.relations())
    if (r.range.is_type() && r.range.type_id == type_id) out.push_back(&r);
  return out;
}

std::vector<std::string> entities_with_type(const KnowledgeBase& kb, const std::string& type_id) {
  const auto& inst = kb.instances_of(type_id);
  return {inst.begin(), inst.end()};
}

}  // namespace

SExprPtr random_entity_expr(const KnowledgeBase& kb, std::mt19937_64& rng,
                            const std::string& target_type, int max_depth) {
  auto pick = [&rng](size_t n) { return static_cast<size_t>(rng() % n); };

  for (int attempt = 0; attempt < 12; ++attempt) {
    int choice = max_depth <= 1 ? static_cast<int>(rng() % 2) : static_cast<int>(rng() % 7);
    switch (choice) {
      case 0:
        return sx::cls(target_type);
      case 1: {
        auto ents = entities_with_type(kb, target_type);
        if (ents.empty()) continue;
        return sx::ent(ents[pick(ents.size())]);
      }
      case 2: {  // forward join: domain(r) == target
        auto rels = relations_with_domain(kb, target_type, false);
        if (rels.empty()) continue;
        const RelationDef* r = rels[pick(rels.size())];
        SExprPtr child;
        if (r->range.is_type())
          child = random_entity_expr(kb, rng, r->range.type_id, max_depth - 1);
        else if (r->range.kind == RangeRef::Kind::Number)
          child = sx::lit(Literal::number(Decimal::from_int(static_cast<long long>(rng() % 200))));
        else
          continue;
        if (!child) continue;
        return sx::join_fwd(r->id, std::move(child));
      }
      case 3: {  // inverse join: range(r) == target
        auto rels = relations_with_range_type(kb, target_type);
        if (rels.empty()) continue;
        const RelationDef* r = rels[pick(rels.size())];
        SExprPtr child = random_entity_expr(kb, rng, r->domain, max_depth - 1);
        if (!child) continue;
        return sx::join_inv(r->id, std::move(child));
      }
      case 4: {  // AND of two exprs sharing the target type
        SExprPtr l = random_entity_expr(kb, rng, target_type, max_depth - 1);
        SExprPtr r = random_entity_expr(kb, rng, target_type, max_depth - 1);
        if (!l || !r) continue;
        return sx::conj(std::move(l), std::move(r));
      }
      case 5: {  // comparative
        auto rels = relations_with_domain(kb, target_type, true);
        if (rels.empty()) continue;
        const RelationDef* r = rels[pick(rels.size())];
        CmpOp op = static_cast<CmpOp>(rng() % 4);
        return sx::cmp(op, r->id,
                       Literal::number(Decimal::from_int(static_cast<long long>(rng() % 200))));
      }
      default: {  // superlative
        auto rels = relations_with_domain(kb, target_type, true);
        if (rels.empty()) continue;
        const RelationDef* r = rels[pick(rels.size())];
        SExprPtr child = random_entity_expr(kb, rng, target_type, max_depth - 1);
        if (!child) continue;
        return rng() % 2 ? sx::argmax(std::move(child), r->id)
                         : sx::argmin(std::move(child), r->id);
      }
    }
  }
  return sx::cls(target_type);
}

SExprPtr random_valid_expr(const KnowledgeBase& kb, std::mt19937_64& rng, int max_depth) {
  std::vector<std::string> type_ids;
  for (const auto& [id, _] : kb.types()) type_ids.push_back(id);
  const std::string& target = type_ids[rng() % type_ids.size()];
  unsigned roll = static_cast<unsigned>(rng() % 10);
  if (roll < 7) return random_entity_expr(kb, rng, target, max_depth);
  if (roll < 9) {
    SExprPtr child = random_entity_expr(kb, rng, target, max_depth - 1);
    return sx::count(std::move(child));
  }
  // literal-kinded root: inverse join over a numeric relation
  std::vector<const RelationDef*> numeric;
  for (const auto& [_, r] : kb.relations())
    if (r.range.kind == RangeRef::Kind::Number) numeric.push_back(&r);
  if (numeric.empty()) return random_entity_expr(kb, rng, target, max_depth);
  const RelationDef* r = numeric[rng() % numeric.size()];
  SExprPtr child = random_entity_expr(kb, rng, r->domain, max_depth - 1);
  return sx::join_inv(r->id, std::move(child));
}

// --------------------------------------------------------------------------
// Brute-force oracle: no adjacency indexes, no sharing with retina::execute.

AnswerSet oracle_execute(const SExpr& e, const KnowledgeBase& kb) {
  if (auto* c = e.as<SExpr::Class>()) {
    AnswerSet out;
    for (const auto& [id, ent] : kb.entities())
      if (ent.types.count(c->type_id)) out.insert(id);
    return out;
  }
  if (auto* en = e.as<SExpr::Entity>()) return {en->entity_id};
  if (auto* l = e.as<SExpr::Lit>()) return {l->value.text};
  if (auto* j = e.as<SExpr::Join>()) {
    AnswerSet child = oracle_execute(*j->child, kb);
    AnswerSet out;
    for (const Fact& f : kb.facts()) {
      if (f.relation != j->rel.rel.id) continue;
      std::string obj = f.object.is_entity() ? f.object.entity_id : f.object.lit.text;
      if (!j->rel.inverse) {
        if (child.count(obj)) out.insert(f.subject);
      } else {
        if (child.count(f.subject)) out.insert(obj);
      }
    }
    return out;
  }
  if (auto* a = e.as<SExpr::And>()) {
    AnswerSet l = oracle_execute(*a->left, kb);
    AnswerSet r = oracle_execute(*a->right, kb);
    AnswerSet out;
    for (const auto& x : l)
      if (r.count(x)) out.insert(x);
    return out;
  }
  if (auto* c = e.as<SExpr::Count>()) {
    return {Decimal::from_int(static_cast<long long>(oracle_execute(*c->child, kb).size())).str()};
  }
  if (auto* s = e.as<SExpr::Superlative>()) {
    AnswerSet child = oracle_execute(*s->child, kb);
    std::vector<std::pair<std::string, Decimal>> best;
    for (const auto& id : child) {
      bool has = false;
      Decimal own;
      for (const Fact& f : kb.facts()) {
        if (f.subject != id || f.relation != s->rel.id || f.object.is_entity()) continue;
        Decimal v = f.object.lit.as_decimal();
        if (!has || (s->is_max ? v > own : v < own)) {
          own = v;
          has = true;
        }
      }
      if (has) best.emplace_back(id, own);
    }
    AnswerSet out;
    if (best.empty()) return out;
    Decimal global = best.front().second;
    for (const auto& [_, v] : best)
      if (s->is_max ? v > global : v < global) global = v;
    for (const auto& [id, v] : best)
      if (v == global) out.insert(id);
    return out;
  }
  auto* c = e.as<SExpr::Cmp>();
  Decimal bound = c->value.as_decimal();
  AnswerSet out;
  for (const Fact& f : kb.facts()) {
    if (f.relation != c->rel.id || f.object.is_entity()) continue;
    Decimal w = f.object.lit.as_decimal();
    bool keep = c->op == CmpOp::Lt   ? w < bound
                : c->op == CmpOp::Le ? w <= bound
                : c->op == CmpOp::Gt ? w > bound
                                     : w >= bound;
    if (keep) out.insert(f.subject);
  }
  return out;
}

std::string make_temp_dir(const std::string& prefix) {
  namespace fs = std::filesystem;
  static std::atomic<unsigned> counter{0};
  fs::path base = fs::temp_directory_path();
  fs::path dir =
      base / (prefix + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::create_directories(dir);
  return dir.string();
}

}  // namespace retina::testkit
