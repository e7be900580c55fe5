#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "retina/kb.hpp"

namespace retina {

// A matched question span; end is exclusive, surface equals the slice.
struct Mention {
  size_t start = 0;
  size_t end = 0;
  std::string surface;

  bool operator==(const Mention& o) const {
    return start == o.start && end == o.end && surface == o.surface;
  }
};

struct EntityLink {
  Mention mention;
  std::string entity_id;
  double score = 0.0;  // disambiguation score (fact degree)
};

struct LinkedEntities {
  std::vector<EntityLink> links;

  bool empty() const { return links.empty(); }
  // Distinct entity ids in first-mention order.
  std::vector<std::string> entity_ids() const;
};

// Lowercases, trims, and collapses whitespace runs to single spaces.
std::string normalize_phrase(std::string_view s);

// Alias phrase -> entity ids carrying it. Phrases are the entity label plus
// the declared aliases, normalized.
class AliasLexicon {
 public:
  static AliasLexicon build(const KnowledgeBase& kb);

  const std::set<std::string>* lookup(const std::string& normalized_phrase) const;
  size_t size() const { return by_phrase_.size(); }
  const std::map<std::string, std::set<std::string>>& phrases() const { return by_phrase_; }

 private:
  std::map<std::string, std::set<std::string>> by_phrase_;
};

// Greedy longest-match-first left-to-right scan, case-insensitive,
// word-boundary-respecting; returned mentions never overlap.
std::vector<Mention> detect_mentions(const std::string& question, const AliasLexicon& lexicon);

// Mention detection + candidate generation + disambiguation by fact degree
// (ties broken by ascending entity id), top_k entities per mention.
LinkedEntities link_entities(const std::string& question, const KnowledgeBase& kb,
                             const AliasLexicon& lexicon, int top_k_per_mention = 1);

}  // namespace retina
