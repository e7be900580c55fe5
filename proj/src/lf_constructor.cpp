#include "retina/lf_constructor.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "retina/executor.hpp"

namespace retina {

std::vector<Literal> question_numbers(const std::string& question) {
  std::vector<Literal> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      if (auto d = Decimal::parse(cur)) out.push_back(Literal::number(*d));
      cur.clear();
    }
  };
  for (char c : question) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-')
      cur += c;
    else
      flush();
  }
  flush();
  return out;
}

namespace {

ItemFlags sketch_flags(const SExpr& tree) {
  ItemFlags flags = lf_flags(tree, CandidateSource::Constructed);
  flags.from_retrieved = false;
  flags.from_constructed = false;
  return flags;
}

}  // namespace

SketchBeam generate_sketches(const std::string& question, const SketchInventory& inventory,
                             const Scorer& ranker, int beam) {
  if (inventory.empty()) throw std::invalid_argument("generate_sketches: empty inventory");

  std::vector<std::pair<double, const SketchInventoryEntry*>> scored;
  scored.reserve(inventory.size());
  for (const auto& entry : inventory.entries) {
    ScoreItem item{entry.key, entry.key, sketch_flags(*entry.sketch.tree)};
    scored.emplace_back(ranker.score_item(question, item), &entry);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  std::vector<Literal> numbers = question_numbers(question);
  SketchBeam out;
  for (const auto& [s, entry] : scored) {
    if (static_cast<int>(out.entries.size()) >= beam) break;
    SExprPtr filled = fill_sketch_literals(entry->sketch.tree, numbers);
    if (!filled) continue;  // numeric slot with no number in the question
    Sketch sk;
    sk.tree = canonicalize(filled);
    sk.counts = entry->sketch.counts;
    out.entries.push_back({std::move(sk), s});
  }
  return out;
}

SchemaCandidates retrieve_schema(const std::string& question, const KnowledgeBase& kb,
                                 const Scorer& type_scorer, const Scorer& relation_scorer,
                                 int k) {
  auto rank = [&question, k](std::vector<ScoredId> items, const Scorer& scorer,
                             auto text_of) {
    for (auto& it : items) it.score = scorer.score_item(question, {it.id, text_of(it.id), {}});
    std::sort(items.begin(), items.end(), [](const ScoredId& a, const ScoredId& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.id < b.id;
    });
    if (k >= 0 && items.size() > static_cast<size_t>(k)) items.resize(static_cast<size_t>(k));
    return items;
  };

  SchemaCandidates out;
  std::vector<ScoredId> types, relations;
  for (const auto& [id, _] : kb.types()) types.push_back({id, 0.0});
  for (const auto& [id, _] : kb.relations()) relations.push_back({id, 0.0});
  out.types = rank(std::move(types), type_scorer,
                   [&kb](const std::string& id) { return kb.type(id)->label; });
  out.relations = rank(std::move(relations), relation_scorer,
                       [&kb](const std::string& id) { return kb.relation(id)->label; });
  return out;
}

namespace {

enum class SlotKind { Type, Rel, Ent };

// Preorder slot positions, matching the printed argument order: a JOIN's
// relation precedes its child, a superlative's child precedes its relation.
void collect_slots(const SExpr& e, std::vector<SlotKind>& out) {
  if (e.as<SExpr::TypeSlot>()) {
    out.push_back(SlotKind::Type);
  } else if (e.as<SExpr::EntitySlot>()) {
    out.push_back(SlotKind::Ent);
  } else if (auto* j = e.as<SExpr::Join>()) {
    if (j->rel.rel.slot) out.push_back(SlotKind::Rel);
    collect_slots(*j->child, out);
  } else if (auto* a = e.as<SExpr::And>()) {
    collect_slots(*a->left, out);
    collect_slots(*a->right, out);
  } else if (auto* c = e.as<SExpr::Count>()) {
    collect_slots(*c->child, out);
  } else if (auto* s = e.as<SExpr::Superlative>()) {
    collect_slots(*s->child, out);
    if (s->rel.slot) out.push_back(SlotKind::Rel);
  } else if (auto* c2 = e.as<SExpr::Cmp>()) {
    if (c2->rel.slot) out.push_back(SlotKind::Rel);
  }
}

SExprPtr substitute(const SExprPtr& e, const std::vector<const std::string*>& chosen,
                    size_t& cursor) {
  if (e->as<SExpr::TypeSlot>()) return sx::cls(*chosen[cursor++]);
  if (e->as<SExpr::EntitySlot>()) return sx::ent(*chosen[cursor++]);
  if (auto* j = e->as<SExpr::Join>()) {
    RelRef rel = j->rel;
    if (rel.rel.slot) rel.rel = RelId::concrete(*chosen[cursor++]);
    return sx::join(rel, substitute(j->child, chosen, cursor));
  }
  if (auto* a = e->as<SExpr::And>()) {
    SExprPtr l = substitute(a->left, chosen, cursor);
    return sx::conj(std::move(l), substitute(a->right, chosen, cursor));
  }
  if (auto* c = e->as<SExpr::Count>()) return sx::count(substitute(c->child, chosen, cursor));
  if (auto* s = e->as<SExpr::Superlative>()) {
    SExprPtr child = substitute(s->child, chosen, cursor);
    RelId rel = s->rel;
    if (rel.slot) rel = RelId::concrete(*chosen[cursor++]);
    return std::make_shared<SExpr>(SExpr::Superlative{s->is_max, std::move(child), rel});
  }
  if (auto* c = e->as<SExpr::Cmp>()) {
    RelId rel = c->rel;
    if (rel.slot) rel = RelId::concrete(*chosen[cursor++]);
    return std::make_shared<SExpr>(SExpr::Cmp{c->op, rel, c->value});
  }
  return e;
}

}  // namespace

std::vector<CandidateLogicalForm> integrate(const SketchBeam& sketches,
                                            const SchemaCandidates& schema,
                                            const LinkedEntities& linked,
                                            const KnowledgeBase& kb,
                                            const ConstructorConfig& cfg) {
  std::vector<CandidateLogicalForm> out;
  std::set<std::string> seen;
  TypeChecker checker(kb);

  std::vector<std::string> type_ids, rel_ids;
  for (const auto& t : schema.types) type_ids.push_back(t.id);
  for (const auto& r : schema.relations) rel_ids.push_back(r.id);
  std::vector<std::string> ent_ids = linked.entity_ids();

  size_t cap = static_cast<size_t>(std::max(0, cfg.max_groundings));

  for (const auto& entry : sketches.entries) {
    if (out.size() >= cap) break;
    std::vector<SlotKind> slots;
    collect_slots(*entry.sketch.tree, slots);

    std::vector<const std::vector<std::string>*> domains;
    domains.reserve(slots.size());
    bool feasible = true;
    for (SlotKind k : slots) {
      const std::vector<std::string>* d = k == SlotKind::Type  ? &type_ids
                                          : k == SlotKind::Rel ? &rel_ids
                                                               : &ent_ids;
      if (d->empty()) {
        feasible = false;
        break;
      }
      domains.push_back(d);
    }
    if (!feasible) continue;

    size_t m = slots.size();
    std::vector<size_t> idx(m, 0);
    while (out.size() < cap) {
      std::vector<const std::string*> chosen(m);
      for (size_t i = 0; i < m; ++i) chosen[i] = &(*domains[i])[idx[i]];
      size_t cursor = 0;
      SExprPtr grounded = substitute(entry.sketch.tree, chosen, cursor);

      if (!cfg.check_groundings || checker.check(grounded).valid) {
        SExprPtr canon = canonicalize(grounded);
        std::string key = print_sexpr(*canon);
        if (seen.insert(key).second) {
          CandidateLogicalForm c;
          c.expr = std::move(canon);
          c.key = std::move(key);
          c.source = CandidateSource::Constructed;
          out.push_back(std::move(c));
        }
      }

      // odometer: the last slot varies fastest
      if (m == 0) break;
      size_t d = m;
      bool rolled_over = true;
      while (d-- > 0) {
        if (++idx[d] < domains[d]->size()) {
          rolled_over = false;
          break;
        }
        idx[d] = 0;
      }
      if (rolled_over) break;
    }
  }
  return out;
}

}  // namespace retina
