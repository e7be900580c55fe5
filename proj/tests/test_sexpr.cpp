#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "retina/errors.hpp"
#include "retina/sexpr.hpp"
#include "support/testkit.hpp"

using namespace retina;

namespace {
SExprPtr parse_toy(const std::string& text) {
  static KbPtr kb = testkit::toy_kb();
  return parse_sexpr(text, kb->id_classifier());
}
}  // namespace

TEST_CASE("parse the running example") {
  SExprPtr e = parse_toy("(AND university (JOIN (R works_at) c_manning))");
  auto* a = e->as<SExpr::And>();
  REQUIRE(a);
  auto* c = a->left->as<SExpr::Class>();
  REQUIRE(c);
  CHECK(c->type_id == "university");
  auto* j = a->right->as<SExpr::Join>();
  REQUIRE(j);
  CHECK(j->rel.inverse);
  CHECK(j->rel.rel.id == "works_at");
  auto* ent = j->child->as<SExpr::Entity>();
  REQUIRE(ent);
  CHECK(ent->entity_id == "c_manning");
}

TEST_CASE("parse COUNT with forward join") {
  SExprPtr e = parse_toy("(COUNT (JOIN works_at stanford))");
  auto* c = e->as<SExpr::Count>();
  REQUIRE(c);
  auto* j = c->child->as<SExpr::Join>();
  REQUIRE(j);
  CHECK_FALSE(j->rel.inverse);
  CHECK(j->rel.rel.id == "works_at");
  CHECK(j->child->as<SExpr::Entity>()->entity_id == "stanford");
}

TEST_CASE("arity and syntax errors") {
  CHECK_THROWS_AS(parse_toy("(AND university)"), SExprError);
  CHECK_THROWS_AS(parse_toy("(AND a b c)"), SExprError);
  CHECK_THROWS_AS(parse_toy("(COUNT)"), SExprError);
  CHECK_THROWS_AS(parse_toy("(FOO x)"), SExprError);
  CHECK_THROWS_AS(parse_toy("(JOIN works_at"), SExprError);
  CHECK_THROWS_AS(parse_toy("(ge works_at abc)"), SExprError);
  CHECK_THROWS_AS(parse_toy("university stanford"), SExprError);
  CHECK_THROWS_AS(parse_toy(""), SExprError);
  CHECK_THROWS_AS(parse_toy(")"), SExprError);
  try {
    parse_toy("(AND university)");
    FAIL("expected SExprError");
  } catch (const SExprError& e) {
    CHECK(std::string(e.what()).find("AND expects 2 arguments") != std::string::npos);
  }
}

TEST_CASE("printer emits canonical surface forms") {
  CHECK(print_sexpr(sx::count(sx::cls("university"))) == "(COUNT university)");
  CHECK(print_sexpr(sx::join_inv("located_in", sx::ent("stanford"))) ==
        "(JOIN (R located_in) stanford)");
  CHECK(print_sexpr(sx::cmp(CmpOp::Ge, "founded_year",
                            Literal::number(*Decimal::parse("1900")))) ==
        "(ge founded_year 1900)");
  CHECK(print_sexpr(sx::argmax(sx::cls("university"), "founded_year")) ==
        "(ARGMAX university founded_year)");
}

TEST_CASE("canonicalize sorts AND operands by printed form") {
  SExprPtr e = sx::conj(sx::ent("zz"), sx::cls("university"));
  // "university" < "zz"
  CHECK(print_sexpr(canonicalize(e)) == "(AND university zz)");

  SExprPtr f = sx::conj(sx::join_inv("works_at", sx::ent("c_manning")), sx::cls("university"));
  // "(JOIN ..." sorts before "university"
  CHECK(print_sexpr(canonicalize(f)) == "(AND (JOIN (R works_at) c_manning) university)");
}

TEST_CASE("canonicalize flattens nested ANDs right-associatively") {
  SExprPtr e = sx::conj(sx::conj(sx::ent("c"), sx::ent("a")), sx::ent("b"));
  SExprPtr canon = canonicalize(e);
  CHECK(print_sexpr(canon) == "(AND a (AND b c))");
  auto* a = canon->as<SExpr::And>();
  REQUIRE(a);
  CHECK(a->right->as<SExpr::And>());
}

TEST_CASE("canonicalize is idempotent on random expressions") {
  KbPtr kb = testkit::random_kb({.seed = 7});
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    SExprPtr e = testkit::random_valid_expr(*kb, rng, 4);
    SExprPtr once = canonicalize(e);
    SExprPtr twice = canonicalize(once);
    CHECK(*once == *twice);
  }
}

TEST_CASE("expression without AND is unchanged by canonicalize") {
  SExprPtr e = sx::count(sx::join_fwd("works_at", sx::ent("stanford")));
  CHECK(canonicalize(e) == e);
}

TEST_CASE("round-trip: parse(print(e)) == e on random expressions") {
  KbPtr kb = testkit::random_kb({.seed = 3});
  std::mt19937_64 rng(5);
  auto ids = kb->id_classifier();
  for (int i = 0; i < 1000; ++i) {
    SExprPtr e = testkit::random_valid_expr(*kb, rng, 4);
    SExprPtr back = parse_sexpr(print_sexpr(*e), ids);
    CHECK(*back == *e);
  }
}

TEST_CASE("extract_sketch replaces KB ids and keeps literals") {
  SExprPtr e = parse_toy("(AND university (JOIN (R works_at) c_manning))");
  Sketch sk = extract_sketch(e);
  CHECK(print_sexpr(*sk.tree) == "(AND TYPE (JOIN (R REL) ENT))");
  CHECK(sk.counts.n_types == 1);
  CHECK(sk.counts.n_relations == 1);
  CHECK(sk.counts.n_entities == 1);

  Sketch count_sk = extract_sketch(parse_toy("(COUNT (JOIN works_at stanford))"));
  CHECK(print_sexpr(*count_sk.tree) == "(COUNT (JOIN REL ENT))");
  CHECK(count_sk.counts.n_types == 0);
  CHECK(count_sk.counts.n_relations == 1);
  CHECK(count_sk.counts.n_entities == 1);

  Sketch cmp_sk = extract_sketch(parse_toy("(ge works_at 1900)"));
  CHECK(print_sexpr(*cmp_sk.tree) == "(ge REL 1900)");
  CHECK(cmp_sk.counts.n_types == 0);
  CHECK(cmp_sk.counts.n_relations == 1);
  CHECK(cmp_sk.counts.n_entities == 0);
  CHECK(cmp_sk.key() == "(ge REL NUM)");
}

TEST_CASE("sketches round-trip through the parser") {
  SExprPtr e = parse_toy("(AND university (JOIN (R works_at) c_manning))");
  Sketch sk = extract_sketch(e);
  SExprPtr back = parse_sexpr(print_sexpr(*sk.tree));
  CHECK(*back == *sk.tree);
}

TEST_CASE("fill_sketch_literals substitutes question numbers in preorder") {
  Sketch sk = extract_sketch(parse_toy("(ge works_at 1900)"));
  auto filled = fill_sketch_literals(sk.tree, {Literal::number(*Decimal::parse("1950"))});
  REQUIRE(filled);
  CHECK(print_sexpr(*filled) == "(ge REL 1950)");
  CHECK(fill_sketch_literals(sk.tree, {}) == nullptr);
}

TEST_CASE("build_sketch_inventory groups by shape") {
  auto mk = [](const std::string& t) { return parse_sexpr(t); };
  std::vector<SExprPtr> lfs = {
      mk("(AND a (JOIN (R r) b))"),
      mk("(AND c (JOIN (R s) d))"),
      mk("(AND e (JOIN (R t) f))"),
      mk("(COUNT (JOIN u g))"),
  };
  // default classifier maps bare ids to entities; shapes still group
  SketchInventory inv = build_sketch_inventory(lfs);
  REQUIRE(inv.size() == 2);
  CHECK(inv.entries[0].frequency == 3);
  CHECK(inv.entries[1].frequency == 1);
  size_t total = 0;
  for (const auto& e : inv.entries) total += e.frequency;
  CHECK(total == lfs.size());

  SketchInventory single = build_sketch_inventory({mk("(COUNT x)")});
  CHECK(single.size() == 1);
  CHECK(single.entries[0].frequency == 1);

  SketchInventory dup = build_sketch_inventory({mk("(COUNT x)"), mk("(COUNT x)")});
  CHECK(dup.size() == 1);
  CHECK(dup.entries[0].frequency == 2);

  CHECK_THROWS_AS(build_sketch_inventory({}), std::invalid_argument);
}

TEST_CASE("inventory save/load round-trip") {
  std::vector<SExprPtr> lfs = {parse_sexpr("(AND a (JOIN (R r) b))"),
                               parse_sexpr("(ge rel 1900)")};
  SketchInventory inv = build_sketch_inventory(lfs);
  std::string path = testkit::make_temp_dir("inv") + "/sketches.tsv";
  save_sketch_inventory(inv, path);
  SketchInventory back = load_sketch_inventory(path);
  REQUIRE(back.size() == inv.size());
  for (size_t i = 0; i < inv.size(); ++i) {
    CHECK(back.entries[i].key == inv.entries[i].key);
    CHECK(back.entries[i].frequency == inv.entries[i].frequency);
    CHECK(*back.entries[i].sketch.tree == *inv.entries[i].sketch.tree);
  }
}

TEST_CASE("collect_ids gathers schema and data identifiers") {
  SExprPtr e = parse_toy("(AND university (JOIN (R works_at) c_manning))");
  SchemaUse use = collect_ids(*e);
  CHECK(use.types == std::set<std::string>{"university"});
  CHECK(use.relations == std::set<std::string>{"works_at"});
  CHECK(use.entities == std::set<std::string>{"c_manning"});
}

TEST_CASE("canonical keys agree across AND permutations") {
  KbPtr kb = testkit::toy_kb();
  auto ids = kb->id_classifier();
  SExprPtr x = sx::cls("university");
  SExprPtr y = sx::join_inv("works_at", sx::ent("c_manning"));
  SExprPtr z = sx::ent("stanford");
  std::vector<SExprPtr> perms = {
      sx::conj(x, sx::conj(y, z)), sx::conj(x, sx::conj(z, y)), sx::conj(sx::conj(x, y), z),
      sx::conj(y, sx::conj(x, z)), sx::conj(sx::conj(z, y), x), sx::conj(z, sx::conj(y, x)),
  };
  std::string key = canonical_key(perms[0]);
  for (const auto& p : perms) CHECK(canonical_key(p) == key);
  // different operand multiset gives a different key
  CHECK(canonical_key(sx::conj(x, y)) != key);
}
