#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include "retina/kb.hpp"
#include "retina/sexpr.hpp"

namespace retina {

// Answer elements are entity ids and/or canonical literal strings; a COUNT
// result is the singleton {count as a canonical number}.
using AnswerSet = std::set<std::string>;

// Result kind of bottom-up type inference.
struct ResultKind {
  enum class Tag { EntityTypes, Literal, Count };
  Tag tag = Tag::EntityTypes;
  std::set<std::string> types;       // when tag == EntityTypes
  LitKind lit_kind = LitKind::String;  // when tag == Literal

  bool is_entity_kinded() const { return tag == Tag::EntityTypes; }
  static ResultKind entity_types(std::set<std::string> t) {
    ResultKind k;
    k.tag = Tag::EntityTypes;
    k.types = std::move(t);
    return k;
  }
  static ResultKind literal(LitKind lk) {
    ResultKind k;
    k.tag = Tag::Literal;
    k.lit_kind = lk;
    return k;
  }
  static ResultKind count() {
    ResultKind k;
    k.tag = Tag::Count;
    return k;
  }
};

struct TypingFailure {
  std::string path;  // dot-joined child indices from the root, "$" for root
  std::string rule;
};

struct TypingResult {
  bool valid = false;
  ResultKind kind;
  std::optional<TypingFailure> failure;

  static TypingResult ok(ResultKind k) { return {true, std::move(k), std::nullopt}; }
  static TypingResult fail(std::string path, std::string rule) {
    return {false, {}, TypingFailure{std::move(path), std::move(rule)}};
  }
};

// Schema-level validity: bottom-up type inference over the KB schema and
// entity type-sets. Invalidity is a result, never an exception.
TypingResult check_validity(const SExpr& expr, const KnowledgeBase& kb);
inline TypingResult check_validity(const SExprPtr& expr, const KnowledgeBase& kb) {
  return check_validity(*expr, kb);
}

// Memoizing checker for the grounding enumeration; the cache is keyed by the
// printed subtree and lives for one integrator invocation.
class TypeChecker {
 public:
  explicit TypeChecker(const KnowledgeBase& kb) : kb_(kb) {}
  const TypingResult& check(const SExprPtr& expr);
  size_t cache_size() const { return cache_.size(); }

 private:
  const KnowledgeBase& kb_;
  std::map<std::string, TypingResult> cache_;
};

// Set-semantics evaluation. Precondition: check_validity(expr, kb).valid;
// throws ValidityError otherwise. The empty result is legal.
AnswerSet execute(const SExpr& expr, const KnowledgeBase& kb);
inline AnswerSet execute(const SExprPtr& expr, const KnowledgeBase& kb) {
  return execute(*expr, kb);
}

}  // namespace retina
