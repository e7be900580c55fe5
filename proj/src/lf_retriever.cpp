#include "retina/lf_retriever.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "retina/executor.hpp"

namespace retina {

const char* candidate_source_name(CandidateSource s) {
  switch (s) {
    case CandidateSource::Retrieved: return "retrieved";
    case CandidateSource::Constructed: return "constructed";
    case CandidateSource::Both: return "both";
  }
  return "?";
}

namespace {

// Relations with at least one fact adjacent to the frontier, by direction.
// Frontier elements are entity ids (literal frontiers cannot be extended).
std::vector<PathStep> realized_steps(const KnowledgeBase& kb,
                                     const std::set<std::string>& frontier) {
  std::set<std::string> fwd, inv;
  for (const auto& id : frontier) {
    for (const Fact* f : kb.facts_by_subject(id)) fwd.insert(f->relation);
    for (const Fact* f : kb.facts_by_object_entity(id)) inv.insert(f->relation);
  }
  std::vector<PathStep> out;
  for (const auto& r : fwd) out.push_back({r, true});
  for (const auto& r : inv) out.push_back({r, false});
  return out;
}

// Entities reachable by one step; literal terminals are returned separately
// as canonical strings via *literals.
std::set<std::string> step_frontier(const KnowledgeBase& kb, const std::set<std::string>& from,
                                    const PathStep& step, bool* has_literals = nullptr) {
  std::set<std::string> out;
  for (const auto& id : from) {
    if (step.forward) {
      for (const Fact* f : kb.facts_by_subject(id)) {
        if (f->relation != step.relation) continue;
        if (f->object.is_entity())
          out.insert(f->object.entity_id);
        else if (has_literals)
          *has_literals = true;
      }
    } else {
      for (const Fact* f : kb.facts_by_object_entity(id))
        if (f->relation == step.relation) out.insert(f->subject);
    }
  }
  return out;
}

}  // namespace

std::vector<KBPath> enumerate_paths(const KnowledgeBase& kb, const LinkedEntities& linked,
                                    const RetrieverConfig& cfg) {
  std::vector<KBPath> paths;
  std::vector<std::string> anchors = linked.entity_ids();
  size_t cap = static_cast<size_t>(std::max(0, cfg.max_paths));

  auto push = [&paths, cap](KBPath p) {
    if (paths.size() < cap) paths.push_back(std::move(p));
  };

  for (const auto& anchor : anchors) {
    if (!kb.has_entity(anchor)) continue;
    std::set<std::string> start{anchor};
    for (const PathStep& s1 : realized_steps(kb, start)) {
      push({anchor, {s1}, std::nullopt});
      std::set<std::string> frontier = step_frontier(kb, start, s1);
      if (frontier.empty()) continue;  // literal terminals end the path
      for (const PathStep& s2 : realized_steps(kb, frontier))
        push({anchor, {s1, s2}, std::nullopt});
    }
  }

  if (anchors.size() == 2) {
    const std::string &a = anchors[0], &b = anchors[1];
    if (kb.has_entity(a) && kb.has_entity(b)) {
      std::set<std::string> sa{a}, sb{b};
      for (const PathStep& s1 : realized_steps(kb, sa)) {
        bool lit_a = false;
        std::set<std::string> ta = step_frontier(kb, sa, s1, &lit_a);
        for (const PathStep& s2 : realized_steps(kb, sb)) {
          std::set<std::string> tb = step_frontier(kb, sb, s2);
          bool shared = false;
          for (const auto& x : ta)
            if (tb.count(x)) {
              shared = true;
              break;
            }
          if (shared) push({a, {s1}, KBPath::Constraint{b, s2}});
        }
      }
    }
  }
  return paths;
}

namespace {

SExprPtr chain_expr(const std::string& anchor, const std::vector<PathStep>& steps) {
  SExprPtr cur = sx::ent(anchor);
  for (const PathStep& s : steps)
    cur = s.forward ? sx::join_inv(s.relation, std::move(cur))
                    : sx::join_fwd(s.relation, std::move(cur));
  return cur;
}

}  // namespace

std::optional<CandidateLogicalForm> make_candidate(const SExprPtr& expr, CandidateSource source,
                                                   const KnowledgeBase& kb) {
  SExprPtr canon = canonicalize(expr);
  if (!check_validity(*canon, kb).valid) return std::nullopt;
  CandidateLogicalForm c;
  c.expr = canon;
  c.key = print_sexpr(*canon);
  c.source = source;
  return c;
}

std::vector<CandidateLogicalForm> paths_to_logical_forms(const std::vector<KBPath>& paths,
                                                         const KnowledgeBase& kb) {
  std::map<std::string, CandidateLogicalForm> by_key;
  auto add = [&by_key, &kb](const SExprPtr& expr) {
    auto c = make_candidate(expr, CandidateSource::Retrieved, kb);
    if (c && !by_key.count(c->key)) by_key.emplace(c->key, std::move(*c));
  };

  for (const KBPath& p : paths) {
    SExprPtr chain = chain_expr(p.anchor, p.steps);
    if (p.constraint)
      chain = sx::conj(chain, chain_expr(p.constraint->anchor, {p.constraint->step}));
    if (!check_validity(*chain, kb).valid) continue;

    add(chain);
    add(sx::count(chain));

    AnswerSet terminal = execute(*chain, kb);
    std::set<std::string> attained;
    for (const auto& el : terminal) {
      const EntityDef* e = kb.entity(el);
      if (e) attained.insert(e->types.begin(), e->types.end());
    }
    for (const auto& t : attained) {
      SExprPtr typed = sx::conj(sx::cls(t), chain);
      add(typed);
      add(sx::count(typed));
    }
  }

  std::vector<CandidateLogicalForm> out;
  out.reserve(by_key.size());
  for (auto& [_, c] : by_key) out.push_back(std::move(c));
  return out;
}

std::string lf_surface_text(const SExpr& expr, const KnowledgeBase& kb) {
  auto label_of = [&kb](const std::string& id) {
    if (const TypeDef* t = kb.type(id)) return t->label;
    if (const EntityDef* e = kb.entity(id)) return e->label;
    if (const RelationDef* r = kb.relation(id)) return r->label;
    return id;
  };
  std::string out;
  std::function<void(const SExpr&)> walk = [&](const SExpr& e) {
    if (auto* c = e.as<SExpr::Class>()) {
      out += label_of(c->type_id);
    } else if (auto* en = e.as<SExpr::Entity>()) {
      out += label_of(en->entity_id);
    } else if (auto* l = e.as<SExpr::Lit>()) {
      out += l->value.text;
    } else if (auto* j = e.as<SExpr::Join>()) {
      out += "(JOIN ";
      if (j->rel.inverse) out += "(R ";
      out += j->rel.rel.slot ? "REL" : label_of(j->rel.rel.id);
      if (j->rel.inverse) out += ')';
      out += ' ';
      walk(*j->child);
      out += ')';
    } else if (auto* a = e.as<SExpr::And>()) {
      out += "(AND ";
      walk(*a->left);
      out += ' ';
      walk(*a->right);
      out += ')';
    } else if (auto* c2 = e.as<SExpr::Count>()) {
      out += "(COUNT ";
      walk(*c2->child);
      out += ')';
    } else if (auto* s = e.as<SExpr::Superlative>()) {
      out += s->is_max ? "(ARGMAX " : "(ARGMIN ";
      walk(*s->child);
      out += ' ';
      out += s->rel.slot ? "REL" : label_of(s->rel.id);
      out += ')';
    } else if (auto* c3 = e.as<SExpr::Cmp>()) {
      out += '(';
      out += cmp_op_name(c3->op);
      out += ' ';
      out += c3->rel.slot ? "REL" : label_of(c3->rel.id);
      out += ' ';
      out += c3->value.text;
      out += ')';
    } else if (e.as<SExpr::TypeSlot>()) {
      out += "TYPE";
    } else {
      out += "ENT";
    }
  };
  walk(expr);
  return out;
}

ItemFlags lf_flags(const SExpr& expr, CandidateSource source) {
  ItemFlags flags;
  flags.from_retrieved = source == CandidateSource::Retrieved || source == CandidateSource::Both;
  flags.from_constructed =
      source == CandidateSource::Constructed || source == CandidateSource::Both;
  std::function<void(const SExpr&)> walk = [&](const SExpr& e) {
    if (e.as<SExpr::Count>()) flags.has_count = true;
    if (e.as<SExpr::Superlative>()) flags.has_superlative = true;
    if (e.as<SExpr::Cmp>()) {
      flags.has_comparator = true;
      flags.has_number = true;
    }
    if (auto* l = e.as<SExpr::Lit>())
      if (l->value.kind == LitKind::Number) flags.has_number = true;
    if (auto* j = e.as<SExpr::Join>()) walk(*j->child);
    if (auto* a = e.as<SExpr::And>()) {
      walk(*a->left);
      walk(*a->right);
    }
    if (auto* c = e.as<SExpr::Count>()) walk(*c->child);
    if (auto* s = e.as<SExpr::Superlative>()) walk(*s->child);
  };
  walk(expr);
  return flags;
}

ScoreItem lf_score_item(const CandidateLogicalForm& c, const KnowledgeBase& kb) {
  return {c.key, lf_surface_text(*c.expr, kb), lf_flags(*c.expr, c.source)};
}

std::vector<CandidateLogicalForm> rank_retrieved(const std::string& question,
                                                 std::vector<CandidateLogicalForm> candidates,
                                                 const Scorer& scorer, const KnowledgeBase& kb,
                                                 int k) {
  for (auto& c : candidates) c.score = scorer.score_item(question, lf_score_item(c, kb));
  std::sort(candidates.begin(), candidates.end(),
            [](const CandidateLogicalForm& a, const CandidateLogicalForm& b) {
              if (*a.score != *b.score) return *a.score > *b.score;
              return a.key < b.key;
            });
  if (k >= 0 && candidates.size() > static_cast<size_t>(k)) candidates.resize(static_cast<size_t>(k));
  return candidates;
}

}  // namespace retina
