#pragma once

#include <optional>
#include <string>
#include <vector>

#include "retina/executor.hpp"
#include "retina/kb.hpp"
#include "retina/sexpr.hpp"

namespace retina {

// Unanswerability category of an example (answerable otherwise).
enum class Category {
  Answerable,
  MissingType,
  MissingRelation,
  MissingMentionEntity,
  MissingOtherEntity,
  MissingFact,
};

const char* category_name(Category c);
std::optional<Category> category_from_name(const std::string& name);

enum class Generalization { Iid, Compositional, ZeroShot };

const char* generalization_name(Generalization g);
std::optional<Generalization> generalization_from_name(const std::string& name);

// A question with its gold targets. gold_lf == nullptr means NK;
// gold_answer == nullopt means NA.
struct QAExample {
  std::string qid;
  std::string question;
  SExprPtr gold_lf;
  std::optional<AnswerSet> gold_answer;
  std::optional<AnswerSet> gold_answer_ideal;
  Category category = Category::Answerable;
  std::optional<Generalization> generalization;

  bool gold_is_nk() const { return gold_lf == nullptr; }
};

// JSON-lines dataset I/O. Keys: qid, question, gold_lf (string or "NK"),
// gold_answer (array or "NA"), gold_answer_ideal?, category, generalization?.
// Lines starting with '#' are skipped. Logical forms are parsed with the
// given classifier; invariant violations raise DataError.
std::vector<QAExample> load_dataset(const std::string& path, const IdClassifier& ids);
void save_dataset(const std::vector<QAExample>& examples, const std::string& path,
                  const std::string& header_comment = "");

}  // namespace retina
