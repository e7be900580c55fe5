#include "retina/entity_linker.hpp"

#include <algorithm>
#include <cctype>

namespace retina {

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

}  // namespace

std::vector<std::string> LinkedEntities::entity_ids() const {
  std::vector<std::string> out;
  for (const auto& l : links)
    if (std::find(out.begin(), out.end(), l.entity_id) == out.end()) out.push_back(l.entity_id);
  return out;
}

std::string normalize_phrase(std::string_view s) {
  std::string out;
  bool in_space = true;  // eat leading whitespace
  for (char c : s) {
    if (is_space(c)) {
      if (!in_space) out += ' ';
      in_space = true;
    } else {
      out += lower(c);
      in_space = false;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

AliasLexicon AliasLexicon::build(const KnowledgeBase& kb) {
  AliasLexicon lex;
  for (const auto& [id, e] : kb.entities()) {
    std::string label = normalize_phrase(e.label);
    if (!label.empty()) lex.by_phrase_[label].insert(id);
    for (const auto& alias : e.aliases) {
      std::string phrase = normalize_phrase(alias);
      if (!phrase.empty()) lex.by_phrase_[phrase].insert(id);
    }
  }
  return lex;
}

const std::set<std::string>* AliasLexicon::lookup(const std::string& normalized_phrase) const {
  auto it = by_phrase_.find(normalized_phrase);
  return it == by_phrase_.end() ? nullptr : &it->second;
}

namespace {

// Matches a normalized phrase against question[i..); a single space in the
// phrase consumes a whitespace run. Returns the end offset, or 0 on mismatch.
size_t match_phrase(const std::string& question, size_t i, const std::string& phrase) {
  size_t j = i;
  for (size_t p = 0; p < phrase.size(); ++p) {
    if (phrase[p] == ' ') {
      if (j >= question.size() || !is_space(question[j])) return 0;
      while (j < question.size() && is_space(question[j])) ++j;
    } else {
      if (j >= question.size() || lower(question[j]) != phrase[p]) return 0;
      ++j;
    }
  }
  if (j < question.size() && is_word_char(question[j])) return 0;  // end boundary
  return j;
}

}  // namespace

std::vector<Mention> detect_mentions(const std::string& question, const AliasLexicon& lexicon) {
  std::vector<Mention> mentions;
  size_t i = 0;
  while (i < question.size()) {
    bool word_start = is_word_char(question[i]) && (i == 0 || !is_word_char(question[i - 1]));
    if (!word_start) {
      ++i;
      continue;
    }
    size_t best_end = 0;
    for (const auto& [phrase, _] : lexicon.phrases()) {
      size_t end = match_phrase(question, i, phrase);
      if (end > best_end) best_end = end;
    }
    if (best_end > i) {
      mentions.push_back({i, best_end, question.substr(i, best_end - i)});
      i = best_end;
    } else {
      ++i;
    }
  }
  return mentions;
}

LinkedEntities link_entities(const std::string& question, const KnowledgeBase& kb,
                             const AliasLexicon& lexicon, int top_k_per_mention) {
  LinkedEntities out;
  for (const Mention& m : detect_mentions(question, lexicon)) {
    const auto* candidates = lexicon.lookup(normalize_phrase(m.surface));
    if (!candidates) continue;
    std::vector<std::pair<std::string, size_t>> ranked;
    for (const auto& id : *candidates)
      if (kb.has_entity(id)) ranked.emplace_back(id, kb.fact_degree(id));
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    int kept = 0;
    for (const auto& [id, degree] : ranked) {
      if (kept++ >= top_k_per_mention) break;
      out.links.push_back({m, id, static_cast<double>(degree)});
    }
  }
  return out;
}

}  // namespace retina
