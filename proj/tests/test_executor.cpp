#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "retina/errors.hpp"
#include "retina/executor.hpp"
#include "support/testkit.hpp"

using namespace retina;

namespace {
KbPtr toy() {
  static KbPtr kb = testkit::toy_kb();
  return kb;
}
SExprPtr parse_toy(const std::string& text) { return parse_sexpr(text, toy()->id_classifier()); }
}  // namespace

TEST_CASE("running example executes to {stanford}") {
  AnswerSet a = execute(parse_toy("(AND university (JOIN (R works_at) c_manning))"), *toy());
  CHECK(a == AnswerSet{"stanford"});
  CHECK(a == testkit::oracle_execute(*parse_toy("(AND university (JOIN (R works_at) c_manning))"),
                                     *toy()));
}

TEST_CASE("broken data path executes to the empty set") {
  KbData d = testkit::toy_kb_data();
  d.facts.erase(d.facts.begin());  // (c_manning, works_at, stanford)
  REQUIRE(d.facts.size() == 1);
  KbPtr kb = KnowledgeBase::build(d);
  SExprPtr lf = parse_sexpr("(AND university (JOIN (R works_at) c_manning))",
                            kb->id_classifier());
  CHECK(check_validity(lf, *kb).valid);
  CHECK(execute(lf, *kb).empty());
}

TEST_CASE("COUNT of an uninstantiated type is {0}") {
  KbData d = testkit::toy_kb_data();
  d.types.push_back({"museum", "museum"});
  KbPtr kb = KnowledgeBase::build(d);
  CHECK(execute(parse_sexpr("(COUNT museum)", kb->id_classifier()), *kb) == AnswerSet{"0"});
}

TEST_CASE("typing of the running example") {
  TypingResult t = check_validity(parse_toy("(AND university (JOIN (R works_at) c_manning))"),
                                  *toy());
  CHECK(t.valid);
  CHECK(t.kind.is_entity_kinded());
  CHECK(t.kind.types == std::set<std::string>{"university"});
}

TEST_CASE("disjoint types fail at AND") {
  TypingResult t = check_validity(parse_toy("(AND city university)"), *toy());
  CHECK_FALSE(t.valid);
  REQUIRE(t.failure.has_value());
  CHECK(t.failure->rule.find("empty type intersection") != std::string::npos);
}

TEST_CASE("forward join range mismatch is invalid") {
  TypingResult t = check_validity(parse_toy("(JOIN works_at palo_alto)"), *toy());
  CHECK_FALSE(t.valid);
  CHECK(t.failure->rule.find("range type") != std::string::npos);
}

TEST_CASE("unknown identifiers are invalid with a reason") {
  KbPtr kb = toy();
  TypingResult t = check_validity(*sx::cls("nonsense"), *kb);
  CHECK_FALSE(t.valid);
  CHECK(t.failure->rule.find("unknown type") != std::string::npos);
  t = check_validity(*sx::join_fwd("nonsense", sx::ent("stanford")), *kb);
  CHECK(t.failure->rule.find("unknown relation") != std::string::npos);
  t = check_validity(*sx::ent("nonsense"), *kb);
  CHECK(t.failure->rule.find("unknown entity") != std::string::npos);
  CHECK(t.failure->path == "$");
}

TEST_CASE("executing an invalid expression throws") {
  CHECK_THROWS_AS(execute(parse_toy("(AND city university)"), *toy()), ValidityError);
}

TEST_CASE("superlatives keep ties and skip entities without the attribute") {
  KbData d = testkit::toy_kb_data();
  d.relations.push_back({"founded_year", "founded", "university", {RangeRef::Kind::Number, ""}});
  d.entities.push_back({"mit", "MIT", {"university"}, {"mit"}});
  d.entities.push_back({"oxford", "Oxford", {"university"}, {"oxford"}});
  auto year = [](const char* y) { return Object::literal(Literal::number(*Decimal::parse(y))); };
  d.facts.push_back({"stanford", "founded_year", year("1885")});
  d.facts.push_back({"mit", "founded_year", year("1885")});
  // oxford has no founded_year fact
  KbPtr kb = KnowledgeBase::build(d);

  AnswerSet max = execute(*sx::argmax(sx::cls("university"), "founded_year"), *kb);
  CHECK(max == AnswerSet{"mit", "stanford"});
  AnswerSet min = execute(*sx::argmin(sx::cls("university"), "founded_year"), *kb);
  CHECK(min == AnswerSet{"mit", "stanford"});

  // all inputs lacking the attribute yield the empty set
  AnswerSet none = execute(*sx::argmax(sx::ent("oxford"), "founded_year"), *kb);
  CHECK(none.empty());
  // wrong domain type is a typing failure, not an execution error
  CHECK_FALSE(check_validity(*sx::argmax(sx::cls("city"), "founded_year"), *kb).valid);
}

TEST_CASE("entity with multiple attribute values uses its own best") {
  KbData d = testkit::toy_kb_data();
  d.relations.push_back({"score", "score", "university", {RangeRef::Kind::Number, ""}});
  d.entities.push_back({"mit", "MIT", {"university"}, {"mit"}});
  auto num = [](const char* y) { return Object::literal(Literal::number(*Decimal::parse(y))); };
  d.facts.push_back({"stanford", "score", num("10")});
  d.facts.push_back({"stanford", "score", num("1")});
  d.facts.push_back({"mit", "score", num("5")});
  KbPtr kb = KnowledgeBase::build(d);
  CHECK(execute(*sx::argmax(sx::cls("university"), "score"), *kb) == AnswerSet{"stanford"});
  CHECK(execute(*sx::argmin(sx::cls("university"), "score"), *kb) == AnswerSet{"stanford"});
}

TEST_CASE("comparatives use exact decimal comparison") {
  KbData d = testkit::toy_kb_data();
  d.relations.push_back({"founded_year", "founded", "university", {RangeRef::Kind::Number, ""}});
  d.entities.push_back({"mit", "MIT", {"university"}, {"mit"}});
  auto num = [](const char* y) { return Object::literal(Literal::number(*Decimal::parse(y))); };
  d.facts.push_back({"stanford", "founded_year", num("1885")});
  d.facts.push_back({"mit", "founded_year", num("1885.5")});
  KbPtr kb = KnowledgeBase::build(d);
  auto ids = kb->id_classifier();
  CHECK(execute(parse_sexpr("(gt founded_year 1885)", ids), *kb) == AnswerSet{"mit"});
  CHECK(execute(parse_sexpr("(ge founded_year 1885)", ids), *kb) == AnswerSet{"mit", "stanford"});
  CHECK(execute(parse_sexpr("(lt founded_year 1885.5)", ids), *kb) == AnswerSet{"stanford"});
  CHECK(execute(parse_sexpr("(le founded_year 1885.50)", ids), *kb) ==
        AnswerSet{"mit", "stanford"});
}

TEST_CASE("soundness: valid random expressions execute without error") {
  std::mt19937_64 rng(42);
  for (int k = 0; k < 20; ++k) {
    KbPtr kb = testkit::random_kb({.n_entities = 25, .seed = 100 + static_cast<uint64_t>(k)});
    for (int i = 0; i < 50; ++i) {
      SExprPtr e = testkit::random_valid_expr(*kb, rng, 4);
      TypingResult t = check_validity(e, *kb);
      REQUIRE_MESSAGE(t.valid, print_sexpr(*e));
      CHECK_NOTHROW(execute(e, *kb));
    }
  }
}

TEST_CASE("oracle equivalence on random expressions and KBs") {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 10; ++k) {
    KbPtr kb = testkit::random_kb({.n_entities = 30, .seed = 500 + static_cast<uint64_t>(k)});
    for (int i = 0; i < 50; ++i) {
      SExprPtr e = testkit::random_valid_expr(*kb, rng, 4);
      CHECK(execute(e, *kb) == testkit::oracle_execute(*e, *kb));
    }
  }
}

TEST_CASE("canonicalization preserves execution") {
  std::mt19937_64 rng(77);
  KbPtr kb = testkit::random_kb({.n_entities = 25, .seed = 9});
  for (int i = 0; i < 200; ++i) {
    SExprPtr e = testkit::random_valid_expr(*kb, rng, 4);
    CHECK(execute(e, *kb) == execute(canonicalize(e), *kb));
  }
}

TEST_CASE("monotonicity: deleting facts never enlarges Join/And/Class/Cmp answers") {
  std::mt19937_64 rng(31337);
  KbPtr kb = testkit::random_kb({.n_entities = 20, .n_facts = 30, .seed = 21});
  // collect expressions without COUNT / superlatives
  std::vector<SExprPtr> exprs;
  while (exprs.size() < 50) {
    SExprPtr e = testkit::random_valid_expr(*kb, rng, 3);
    std::string p = print_sexpr(*e);
    if (p.find("COUNT") != std::string::npos || p.find("ARGM") != std::string::npos) continue;
    exprs.push_back(e);
  }
  KbData reduced = kb->to_data();
  // drop every other fact
  std::vector<Fact> kept;
  for (size_t i = 0; i < reduced.facts.size(); ++i)
    if (i % 2 == 0) kept.push_back(reduced.facts[i]);
  reduced.facts = kept;
  KbPtr kb2 = KnowledgeBase::build(reduced);
  for (const auto& e : exprs) {
    if (!check_validity(e, *kb2).valid) continue;
    AnswerSet before = execute(e, *kb);
    AnswerSet after = execute(e, *kb2);
    for (const auto& x : after) CHECK(before.count(x) == 1);
  }
}

TEST_CASE("check_validity depends on schema and type-sets only") {
  KbData d = testkit::toy_kb_data();
  KbPtr with_facts = KnowledgeBase::build(d);
  KbData no_facts = d;
  no_facts.facts.clear();
  KbPtr without_facts = KnowledgeBase::build(no_facts);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    SExprPtr e = testkit::random_valid_expr(*with_facts, rng, 3);
    TypingResult a = check_validity(e, *with_facts);
    TypingResult b = check_validity(e, *without_facts);
    CHECK(a.valid == b.valid);
  }
}

TEST_CASE("TypeChecker caches repeated subtrees") {
  KbPtr kb = toy();
  TypeChecker checker(*kb);
  SExprPtr e = parse_toy("(AND university (JOIN (R works_at) c_manning))");
  const TypingResult& r1 = checker.check(e);
  CHECK(r1.valid);
  size_t n = checker.cache_size();
  const TypingResult& r2 = checker.check(e);
  CHECK(r2.valid);
  CHECK(checker.cache_size() == n);
}
