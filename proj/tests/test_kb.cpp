#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "retina/kb.hpp"
#include "support/testkit.hpp"

using namespace retina;
namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

std::string write_toy_tsv() {
  std::string dir = testkit::make_temp_dir("kbtest");
  write_file(fs::path(dir) / "types.tsv",
             "# id\tlabel\n"
             "researcher\tresearcher\n"
             "university\tuniversity\n"
             "city\tcity\n");
  write_file(fs::path(dir) / "relations.tsv",
             "works_at\tworks at\tresearcher\tuniversity\n"
             "located_in\tlocated in\tuniversity\tcity\n");
  write_file(fs::path(dir) / "entities.tsv",
             "c_manning\tC. Manning\tresearcher\tc. manning|manning\n"
             "stanford\tStanford\tuniversity\tstanford\n"
             "palo_alto\tPalo Alto\tcity\tpalo alto\n");
  write_file(fs::path(dir) / "facts.tsv",
             "c_manning\tworks_at\tstanford\n"
             "stanford\tlocated_in\tpalo_alto\n");
  return dir;
}

}  // namespace

TEST_CASE("load_kb on well-formed toy files") {
  std::string dir = write_toy_tsv();
  KbPtr kb = load_kb(dir);
  CHECK(kb->types().size() == 3);
  CHECK(kb->relations().size() == 2);
  CHECK(kb->entities().size() == 3);
  CHECK(kb->facts().size() == 2);
  CHECK(kb->instances_of("university").count("stanford") == 1);
  CHECK(kb->facts_by_subject("c_manning").size() == 1);
  CHECK(kb->facts_by_object_entity("stanford").size() == 1);
  CHECK(kb->fact_degree("stanford") == 2);
}

TEST_CASE("empty facts file gives empty fact set") {
  std::string dir = write_toy_tsv();
  write_file(fs::path(dir) / "facts.tsv", "# empty\n");
  KbPtr kb = load_kb(dir);
  CHECK(kb->facts().empty());
}

TEST_CASE("fact whose subject lacks the domain type is rejected") {
  std::string dir = write_toy_tsv();
  write_file(fs::path(dir) / "facts.tsv", "stanford\tworks_at\tstanford\n");
  CHECK_THROWS_WITH_AS(load_kb(dir),
                       doctest::Contains("lacks domain type"), IntegrityError);
}

TEST_CASE("parse error cites file and line") {
  std::string dir = write_toy_tsv();
  write_file(fs::path(dir) / "facts.tsv", "c_manning\tworks_at\tstanford\nbadline\n");
  try {
    load_kb(dir);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("facts.tsv:2") != std::string::npos);
  }
}

TEST_CASE("literal objects parse and validate") {
  std::string dir = write_toy_tsv();
  write_file(fs::path(dir) / "relations.tsv",
             "works_at\tworks at\tresearcher\tuniversity\n"
             "located_in\tlocated in\tuniversity\tcity\n"
             "founded_year\tfounded in year\tuniversity\tnumber:\n"
             "motto\tmotto\tuniversity\tstring:\n");
  write_file(fs::path(dir) / "facts.tsv",
             "c_manning\tworks_at\tstanford\n"
             "stanford\tfounded_year\tnumber:1885.0\n"
             "stanford\tmotto\tstring:the wind of freedom blows\n");
  KbPtr kb = load_kb(dir);
  CHECK(kb->facts().size() == 3);
  // canonical number text
  bool found = false;
  for (const auto& f : kb->facts())
    if (f.relation == "founded_year") {
      CHECK(f.object.lit.text == "1885");
      found = true;
    }
  CHECK(found);
}

TEST_CASE("validate_kb reports zero violations for a loadable KB") {
  CHECK(validate_kb(testkit::toy_kb_data()).ok());
}

TEST_CASE("validate_kb: dangling subject is one violation") {
  KbData d = testkit::toy_kb_data();
  d.entities.erase(d.entities.begin());  // drop c_manning, keep its fact
  ValidationReport r = validate_kb(d);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].find("dangling subject") != std::string::npos);
}

TEST_CASE("validate_kb: duplicate entity id") {
  KbData d = testkit::toy_kb_data();
  d.entities.push_back(d.entities[0]);
  ValidationReport r = validate_kb(d);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].find("duplicate entity id") != std::string::npos);
}

TEST_CASE("validate_kb: number object on entity-ranged relation") {
  KbData d = testkit::toy_kb_data();
  d.facts.push_back({"c_manning", "works_at",
                     Object::literal(Literal::number(Decimal::from_int(3)))});
  CHECK_FALSE(validate_kb(d).ok());
}

TEST_CASE("save_kb round-trips through load_kb") {
  KbPtr kb = testkit::toy_kb();
  std::string dir = testkit::make_temp_dir("kbsave");
  save_kb(*kb, dir);
  KbPtr again = load_kb(dir);
  CHECK(again->types().size() == kb->types().size());
  CHECK(again->relations().size() == kb->relations().size());
  CHECK(again->entities().size() == kb->entities().size());
  CHECK(again->facts() == kb->facts());
  CHECK(again->entity("c_manning")->aliases == kb->entity("c_manning")->aliases);
}

TEST_CASE("object token round-trip") {
  CHECK(Object::from_token("stanford").token() == "stanford");
  CHECK(Object::from_token("number:3.50").token() == "number:3.5");
  CHECK(Object::from_token("string:palo alto").token() == "string:palo alto");
  CHECK_THROWS_AS(Object::from_token("number:abc"), DataError);
}

TEST_CASE("id classifier distinguishes kinds") {
  KbPtr kb = testkit::toy_kb();
  auto ids = kb->id_classifier();
  CHECK(ids("university") == IdKind::Type);
  CHECK(ids("c_manning") == IdKind::Entity);
  CHECK(ids("works_at") == IdKind::Relation);
  CHECK(ids("nonsense") == IdKind::Unknown);
}
