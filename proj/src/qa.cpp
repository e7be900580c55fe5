#include "retina/qa.hpp"

#include <fstream>

#include <json.hpp>

#include "retina/errors.hpp"

namespace retina {

using nlohmann::json;

const char* category_name(Category c) {
  switch (c) {
    case Category::Answerable: return "answerable";
    case Category::MissingType: return "missing-type";
    case Category::MissingRelation: return "missing-relation";
    case Category::MissingMentionEntity: return "missing-mention-entity";
    case Category::MissingOtherEntity: return "missing-other-entity";
    case Category::MissingFact: return "missing-fact";
  }
  return "?";
}

std::optional<Category> category_from_name(const std::string& name) {
  for (Category c : {Category::Answerable, Category::MissingType, Category::MissingRelation,
                     Category::MissingMentionEntity, Category::MissingOtherEntity,
                     Category::MissingFact})
    if (name == category_name(c)) return c;
  return std::nullopt;
}

const char* generalization_name(Generalization g) {
  switch (g) {
    case Generalization::Iid: return "iid";
    case Generalization::Compositional: return "compositional";
    case Generalization::ZeroShot: return "zero-shot";
  }
  return "?";
}

std::optional<Generalization> generalization_from_name(const std::string& name) {
  for (Generalization g :
       {Generalization::Iid, Generalization::Compositional, Generalization::ZeroShot})
    if (name == generalization_name(g)) return g;
  return std::nullopt;
}

namespace {

std::optional<AnswerSet> answer_from_json(const json& j, const std::string& where) {
  if (j.is_string()) {
    if (j.get<std::string>() == "NA") return std::nullopt;
    throw DataError(where + ": answer must be an array or \"NA\"");
  }
  if (!j.is_array()) throw DataError(where + ": answer must be an array or \"NA\"");
  AnswerSet out;
  for (const auto& el : j) {
    if (!el.is_string()) throw DataError(where + ": answer elements must be strings");
    out.insert(el.get<std::string>());
  }
  return out;
}

json answer_to_json(const std::optional<AnswerSet>& a) {
  if (!a) return json("NA");
  json arr = json::array();
  for (const auto& x : *a) arr.push_back(x);
  return arr;
}

}  // namespace

std::vector<QAExample> load_dataset(const std::string& path, const IdClassifier& ids) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open");
  std::vector<QAExample> out;
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
    QAExample ex;
    try {
      ex.qid = j.at("qid").get<std::string>();
      ex.question = j.at("question").get<std::string>();
      std::string lf = j.at("gold_lf").get<std::string>();
      if (lf != "NK") {
        try {
          ex.gold_lf = parse_sexpr(lf, ids);
        } catch (const SExprError& e) {
          throw DataError(where + ": gold_lf: " + e.what());
        }
      }
      ex.gold_answer = answer_from_json(j.at("gold_answer"), where);
      if (j.contains("gold_answer_ideal"))
        ex.gold_answer_ideal = answer_from_json(j.at("gold_answer_ideal"), where);
      std::string cat = j.at("category").get<std::string>();
      auto c = category_from_name(cat);
      if (!c) throw DataError(where + ": unknown category '" + cat + "'");
      ex.category = *c;
      if (j.contains("generalization")) {
        std::string g = j.at("generalization").get<std::string>();
        auto gg = generalization_from_name(g);
        if (!gg) throw DataError(where + ": unknown generalization '" + g + "'");
        ex.generalization = gg;
      }
    } catch (const json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
    if (ex.gold_is_nk() && ex.gold_answer.has_value())
      throw DataError(where + ": gold_lf NK requires gold_answer NA");
    if (ex.category == Category::Answerable &&
        (!ex.gold_answer.has_value() || ex.gold_answer->empty()))
      throw DataError(where + ": answerable example requires a non-empty gold_answer");
    out.push_back(std::move(ex));
  }
  return out;
}

void save_dataset(const std::vector<QAExample>& examples, const std::string& path,
                  const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw DataError(path + ": cannot open for writing");
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  for (const auto& ex : examples) {
    json j;
    j["qid"] = ex.qid;
    j["question"] = ex.question;
    j["gold_lf"] = ex.gold_lf ? print_sexpr(*ex.gold_lf) : "NK";
    j["gold_answer"] = answer_to_json(ex.gold_answer);
    if (ex.gold_answer_ideal) j["gold_answer_ideal"] = answer_to_json(ex.gold_answer_ideal);
    j["category"] = category_name(ex.category);
    if (ex.generalization) j["generalization"] = generalization_name(*ex.generalization);
    out << j.dump() << '\n';
  }
}

}  // namespace retina
