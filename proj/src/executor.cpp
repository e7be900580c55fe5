#include "retina/executor.hpp"

#include <algorithm>

#include "retina/errors.hpp"

namespace retina {

namespace {

std::string child_path(const std::string& path, int idx) {
  return path + "." + std::to_string(idx);
}

using ChildCheck = std::function<TypingResult(const SExprPtr&, const std::string&)>;

TypingResult check_shallow(const SExpr& e, const KnowledgeBase& kb, const std::string& path,
                           const ChildCheck& check_child);

TypingResult check_node(const SExpr& e, const KnowledgeBase& kb, const std::string& path) {
  return check_shallow(e, kb, path, [&kb](const SExprPtr& c, const std::string& p) {
    return check_node(*c, kb, p);
  });
}

// One inference rule; children are checked through the callback so that the
// memoizing checker can reuse sub-tree results.
TypingResult check_shallow(const SExpr& e, const KnowledgeBase& kb, const std::string& path,
                           const ChildCheck& check_child) {
  if (auto* c = e.as<SExpr::Class>()) {
    if (!kb.has_type(c->type_id))
      return TypingResult::fail(path, "unknown type '" + c->type_id + "'");
    return TypingResult::ok(ResultKind::entity_types({c->type_id}));
  }
  if (auto* en = e.as<SExpr::Entity>()) {
    const EntityDef* def = kb.entity(en->entity_id);
    if (!def) return TypingResult::fail(path, "unknown entity '" + en->entity_id + "'");
    return TypingResult::ok(ResultKind::entity_types(def->types));
  }
  if (auto* l = e.as<SExpr::Lit>()) {
    return TypingResult::ok(ResultKind::literal(l->value.kind));
  }
  if (auto* j = e.as<SExpr::Join>()) {
    if (j->rel.rel.slot) return TypingResult::fail(path, "ungrounded relation slot");
    const RelationDef* rel = kb.relation(j->rel.rel.id);
    if (!rel) return TypingResult::fail(path, "unknown relation '" + j->rel.rel.id + "'");
    TypingResult child = check_child(j->child, child_path(path, 1));
    if (!child.valid) return child;
    if (!j->rel.inverse) {
      // (JOIN r u): u binds objects of r, result is the domain type.
      if (rel->range.is_type()) {
        if (!child.kind.is_entity_kinded() || child.kind.types.count(rel->range.type_id) == 0)
          return TypingResult::fail(path, "JOIN child does not match range type '" +
                                              rel->range.type_id + "' of '" + rel->id + "'");
      } else {
        LitKind want =
            rel->range.kind == RangeRef::Kind::Number ? LitKind::Number : LitKind::String;
        if (child.kind.tag != ResultKind::Tag::Literal || child.kind.lit_kind != want)
          return TypingResult::fail(path, "JOIN child does not match literal range of '" +
                                              rel->id + "'");
      }
      return TypingResult::ok(ResultKind::entity_types({rel->domain}));
    }
    // (JOIN (R r) u): u binds subjects of r, result is the range.
    if (!child.kind.is_entity_kinded() || child.kind.types.count(rel->domain) == 0)
      return TypingResult::fail(path, "JOIN child does not match domain type '" + rel->domain +
                                          "' of '" + rel->id + "'");
    if (rel->range.is_type())
      return TypingResult::ok(ResultKind::entity_types({rel->range.type_id}));
    return TypingResult::ok(ResultKind::literal(
        rel->range.kind == RangeRef::Kind::Number ? LitKind::Number : LitKind::String));
  }
  if (auto* a = e.as<SExpr::And>()) {
    TypingResult l = check_child(a->left, child_path(path, 0));
    if (!l.valid) return l;
    TypingResult r = check_child(a->right, child_path(path, 1));
    if (!r.valid) return r;
    if (!l.kind.is_entity_kinded() || !r.kind.is_entity_kinded())
      return TypingResult::fail(path, "AND operands must be entity-kinded");
    std::set<std::string> inter;
    std::set_intersection(l.kind.types.begin(), l.kind.types.end(), r.kind.types.begin(),
                          r.kind.types.end(), std::inserter(inter, inter.begin()));
    if (inter.empty()) return TypingResult::fail(path, "empty type intersection at AND");
    return TypingResult::ok(ResultKind::entity_types(std::move(inter)));
  }
  if (auto* c = e.as<SExpr::Count>()) {
    TypingResult child = check_child(c->child, child_path(path, 0));
    if (!child.valid) return child;
    return TypingResult::ok(ResultKind::count());
  }
  if (auto* s = e.as<SExpr::Superlative>()) {
    if (s->rel.slot) return TypingResult::fail(path, "ungrounded relation slot");
    const RelationDef* rel = kb.relation(s->rel.id);
    if (!rel) return TypingResult::fail(path, "unknown relation '" + s->rel.id + "'");
    TypingResult child = check_child(s->child, child_path(path, 0));
    if (!child.valid) return child;
    if (!child.kind.is_entity_kinded())
      return TypingResult::fail(path, "superlative child must be entity-kinded");
    if (child.kind.types.count(rel->domain) == 0)
      return TypingResult::fail(path, "superlative child does not match domain type '" +
                                          rel->domain + "' of '" + rel->id + "'");
    if (rel->range.kind != RangeRef::Kind::Number)
      return TypingResult::fail(path, "superlative relation '" + rel->id + "' is not numeric");
    return TypingResult::ok(ResultKind::entity_types({rel->domain}));
  }
  if (auto* c = e.as<SExpr::Cmp>()) {
    if (c->rel.slot) return TypingResult::fail(path, "ungrounded relation slot");
    const RelationDef* rel = kb.relation(c->rel.id);
    if (!rel) return TypingResult::fail(path, "unknown relation '" + c->rel.id + "'");
    if (rel->range.kind != RangeRef::Kind::Number)
      return TypingResult::fail(path, "comparative relation '" + rel->id + "' is not numeric");
    return TypingResult::ok(ResultKind::entity_types({rel->domain}));
  }
  // TypeSlot / EntitySlot
  return TypingResult::fail(path, "ungrounded slot");
}

}  // namespace

TypingResult check_validity(const SExpr& expr, const KnowledgeBase& kb) {
  return check_node(expr, kb, "$");
}

const TypingResult& TypeChecker::check(const SExprPtr& expr) {
  std::string key = print_sexpr(*expr);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  TypingResult res =
      check_shallow(*expr, kb_, "$", [this](const SExprPtr& c, const std::string&) {
        return check(c);
      });
  return cache_.emplace(std::move(key), std::move(res)).first->second;
}

namespace {

std::string object_value(const Object& o) {
  return o.is_entity() ? o.entity_id : o.lit.text;
}

AnswerSet eval_node(const SExpr& e, const KnowledgeBase& kb) {
  if (auto* c = e.as<SExpr::Class>()) {
    const auto& inst = kb.instances_of(c->type_id);
    return AnswerSet(inst.begin(), inst.end());
  }
  if (auto* en = e.as<SExpr::Entity>()) return {en->entity_id};
  if (auto* l = e.as<SExpr::Lit>()) return {l->value.text};
  if (auto* j = e.as<SExpr::Join>()) {
    AnswerSet child = eval_node(*j->child, kb);
    AnswerSet out;
    for (const Fact* f : kb.facts_by_relation(j->rel.rel.id)) {
      if (!j->rel.inverse) {
        if (child.count(object_value(f->object))) out.insert(f->subject);
      } else {
        if (child.count(f->subject)) out.insert(object_value(f->object));
      }
    }
    return out;
  }
  if (auto* a = e.as<SExpr::And>()) {
    AnswerSet l = eval_node(*a->left, kb);
    AnswerSet r = eval_node(*a->right, kb);
    AnswerSet out;
    std::set_intersection(l.begin(), l.end(), r.begin(), r.end(),
                          std::inserter(out, out.begin()));
    return out;
  }
  if (auto* c = e.as<SExpr::Count>()) {
    AnswerSet child = eval_node(*c->child, kb);
    return {Decimal::from_int(static_cast<long long>(child.size())).str()};
  }
  if (auto* s = e.as<SExpr::Superlative>()) {
    AnswerSet child = eval_node(*s->child, kb);
    // per-entity best value, then keep all entities attaining the global best
    std::map<std::string, Decimal> best;
    for (const auto& id : child) {
      std::optional<Decimal> own;
      for (const Fact* f : kb.facts_by_subject(id)) {
        if (f->relation != s->rel.id || f->object.is_entity()) continue;
        Decimal v = f->object.lit.as_decimal();
        if (!own || (s->is_max ? v > *own : v < *own)) own = v;
      }
      if (own) best.emplace(id, *own);
    }
    if (best.empty()) return {};
    const Decimal* global = nullptr;
    for (const auto& [_, v] : best)
      if (!global || (s->is_max ? v > *global : v < *global)) global = &v;
    AnswerSet out;
    for (const auto& [id, v] : best)
      if (v == *global) out.insert(id);
    return out;
  }
  auto* c = e.as<SExpr::Cmp>();
  Decimal bound = c->value.as_decimal();
  AnswerSet out;
  for (const Fact* f : kb.facts_by_relation(c->rel.id)) {
    if (f->object.is_entity()) continue;
    Decimal w = f->object.lit.as_decimal();
    bool keep = false;
    switch (c->op) {
      case CmpOp::Lt: keep = w < bound; break;
      case CmpOp::Le: keep = w <= bound; break;
      case CmpOp::Gt: keep = w > bound; break;
      case CmpOp::Ge: keep = w >= bound; break;
    }
    if (keep) out.insert(f->subject);
  }
  return out;
}

}  // namespace

AnswerSet execute(const SExpr& expr, const KnowledgeBase& kb) {
  TypingResult typing = check_validity(expr, kb);
  if (!typing.valid)
    throw ValidityError("cannot execute invalid logical form: " + typing.failure->rule + " (" +
                        typing.failure->path + ")");
  return eval_node(expr, kb);
}

}  // namespace retina
