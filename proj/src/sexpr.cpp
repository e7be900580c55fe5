#include "retina/sexpr.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <fstream>

#include "retina/errors.hpp"

namespace retina {

const char* cmp_op_name(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "lt";
    case CmpOp::Le: return "le";
    case CmpOp::Gt: return "gt";
    case CmpOp::Ge: return "ge";
  }
  return "?";
}

namespace sx {
SExprPtr cls(std::string type_id) {
  return std::make_shared<SExpr>(SExpr::Class{std::move(type_id)});
}
SExprPtr ent(std::string entity_id) {
  return std::make_shared<SExpr>(SExpr::Entity{std::move(entity_id)});
}
SExprPtr lit(Literal value) { return std::make_shared<SExpr>(SExpr::Lit{std::move(value)}); }
SExprPtr num(const std::string& decimal_text) {
  auto d = Decimal::parse(decimal_text);
  if (!d) throw std::invalid_argument("not a decimal: " + decimal_text);
  return lit(Literal::number(*d));
}
SExprPtr join(RelRef rel, SExprPtr child) {
  return std::make_shared<SExpr>(SExpr::Join{std::move(rel), std::move(child)});
}
SExprPtr join_fwd(std::string relation, SExprPtr child) {
  return join({RelId::concrete(std::move(relation)), false}, std::move(child));
}
SExprPtr join_inv(std::string relation, SExprPtr child) {
  return join({RelId::concrete(std::move(relation)), true}, std::move(child));
}
SExprPtr conj(SExprPtr left, SExprPtr right) {
  return std::make_shared<SExpr>(SExpr::And{std::move(left), std::move(right)});
}
SExprPtr count(SExprPtr child) { return std::make_shared<SExpr>(SExpr::Count{std::move(child)}); }
SExprPtr argmin(SExprPtr child, std::string relation) {
  return std::make_shared<SExpr>(
      SExpr::Superlative{false, std::move(child), RelId::concrete(std::move(relation))});
}
SExprPtr argmax(SExprPtr child, std::string relation) {
  return std::make_shared<SExpr>(
      SExpr::Superlative{true, std::move(child), RelId::concrete(std::move(relation))});
}
SExprPtr cmp(CmpOp op, std::string relation, Literal value) {
  return std::make_shared<SExpr>(
      SExpr::Cmp{op, RelId::concrete(std::move(relation)), std::move(value)});
}
SExprPtr type_slot() { return std::make_shared<SExpr>(SExpr::TypeSlot{}); }
SExprPtr entity_slot() { return std::make_shared<SExpr>(SExpr::EntitySlot{}); }
}  // namespace sx

bool operator==(const SExpr& a, const SExpr& b) {
  if (a.node().index() != b.node().index()) return false;
  if (auto* c = a.as<SExpr::Class>()) return c->type_id == b.as<SExpr::Class>()->type_id;
  if (auto* e = a.as<SExpr::Entity>()) return e->entity_id == b.as<SExpr::Entity>()->entity_id;
  if (auto* l = a.as<SExpr::Lit>()) return l->value == b.as<SExpr::Lit>()->value;
  if (auto* j = a.as<SExpr::Join>()) {
    auto* k = b.as<SExpr::Join>();
    return j->rel == k->rel && *j->child == *k->child;
  }
  if (auto* x = a.as<SExpr::And>()) {
    auto* y = b.as<SExpr::And>();
    return *x->left == *y->left && *x->right == *y->right;
  }
  if (auto* c = a.as<SExpr::Count>()) return *c->child == *b.as<SExpr::Count>()->child;
  if (auto* s = a.as<SExpr::Superlative>()) {
    auto* t = b.as<SExpr::Superlative>();
    return s->is_max == t->is_max && s->rel == t->rel && *s->child == *t->child;
  }
  if (auto* c = a.as<SExpr::Cmp>()) {
    auto* d = b.as<SExpr::Cmp>();
    return c->op == d->op && c->rel == d->rel && c->value == d->value;
  }
  return true;  // TypeSlot / EntitySlot
}

namespace {

void print_rel(const RelId& rel, std::string& out) { out += rel.slot ? "REL" : rel.id; }

// abstract_numbers replaces number literal values with NUM (sketch keys).
void print_node(const SExpr& e, std::string& out, bool abstract_numbers) {
  if (auto* c = e.as<SExpr::Class>()) {
    out += c->type_id;
  } else if (auto* en = e.as<SExpr::Entity>()) {
    out += en->entity_id;
  } else if (auto* l = e.as<SExpr::Lit>()) {
    if (l->value.kind == LitKind::Number)
      out += abstract_numbers ? "NUM" : l->value.text;
    else
      out += "string:" + l->value.text;
  } else if (auto* j = e.as<SExpr::Join>()) {
    out += "(JOIN ";
    if (j->rel.inverse) {
      out += "(R ";
      print_rel(j->rel.rel, out);
      out += ')';
    } else {
      print_rel(j->rel.rel, out);
    }
    out += ' ';
    print_node(*j->child, out, abstract_numbers);
    out += ')';
  } else if (auto* a = e.as<SExpr::And>()) {
    out += "(AND ";
    print_node(*a->left, out, abstract_numbers);
    out += ' ';
    print_node(*a->right, out, abstract_numbers);
    out += ')';
  } else if (auto* c2 = e.as<SExpr::Count>()) {
    out += "(COUNT ";
    print_node(*c2->child, out, abstract_numbers);
    out += ')';
  } else if (auto* s = e.as<SExpr::Superlative>()) {
    out += s->is_max ? "(ARGMAX " : "(ARGMIN ";
    print_node(*s->child, out, abstract_numbers);
    out += ' ';
    print_rel(s->rel, out);
    out += ')';
  } else if (auto* c3 = e.as<SExpr::Cmp>()) {
    out += '(';
    out += cmp_op_name(c3->op);
    out += ' ';
    print_rel(c3->rel, out);
    out += ' ';
    out += abstract_numbers ? "NUM" : c3->value.text;
    out += ')';
  } else if (e.as<SExpr::TypeSlot>()) {
    out += "TYPE";
  } else {
    out += "ENT";
  }
}

}  // namespace

std::string print_sexpr(const SExpr& expr) {
  std::string out;
  print_node(expr, out, false);
  return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Token {
  std::string text;
  size_t pos = 0;
  bool paren_open = false;
  bool paren_close = false;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> toks;
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '(') {
      toks.push_back({"(", i, true, false});
      ++i;
      continue;
    }
    if (c == ')') {
      toks.push_back({")", i, false, true});
      ++i;
      continue;
    }
    size_t start = i;
    while (i < text.size() && text[i] != ' ' && text[i] != '\t' && text[i] != '\n' &&
           text[i] != '\r' && text[i] != '(' && text[i] != ')')
      ++i;
    toks.push_back({std::string(text.substr(start, i - start)), start, false, false});
  }
  return toks;
}

bool is_operator_token(const std::string& t) {
  return t == "AND" || t == "JOIN" || t == "COUNT" || t == "ARGMIN" || t == "ARGMAX" ||
         t == "R" || t == "lt" || t == "le" || t == "gt" || t == "ge";
}

class Parser {
 public:
  Parser(std::vector<Token> toks, const IdClassifier& ids, size_t input_len)
      : toks_(std::move(toks)), ids_(ids), input_len_(input_len) {}

  SExprPtr run() {
    SExprPtr e = parse_expr();
    if (pos_ < toks_.size())
      throw SExprError("trailing tokens after expression", toks_[pos_].pos);
    return e;
  }

 private:
  const Token& peek() {
    if (pos_ >= toks_.size()) throw SExprError("unexpected end of input", input_len_);
    return toks_[pos_];
  }
  Token take() {
    Token t = peek();
    ++pos_;
    return t;
  }
  void expect_close(const std::string& form) {
    const Token& t = peek();
    if (!t.paren_close)
      throw SExprError(form + " has too many arguments", t.pos);
    ++pos_;
  }

  SExprPtr parse_expr() {
    Token t = take();
    if (t.paren_close) throw SExprError("unexpected ')'", t.pos);
    if (!t.paren_open) return parse_atom(t);

    Token head = take();
    if (head.paren_open || head.paren_close)
      throw SExprError("expected function name after '('", head.pos);
    const std::string& f = head.text;

    if (f == "AND") {
      if (peek().paren_close) throw SExprError("AND expects 2 arguments", peek().pos);
      SExprPtr l = parse_expr();
      if (peek().paren_close) throw SExprError("AND expects 2 arguments", peek().pos);
      SExprPtr r = parse_expr();
      expect_close("AND");
      return sx::conj(std::move(l), std::move(r));
    }
    if (f == "JOIN") {
      RelRef rel = parse_relref();
      if (peek().paren_close) throw SExprError("JOIN expects 2 arguments", peek().pos);
      SExprPtr child = parse_expr();
      expect_close("JOIN");
      return sx::join(std::move(rel), std::move(child));
    }
    if (f == "COUNT") {
      if (peek().paren_close) throw SExprError("COUNT expects 1 argument", peek().pos);
      SExprPtr child = parse_expr();
      expect_close("COUNT");
      return sx::count(std::move(child));
    }
    if (f == "ARGMIN" || f == "ARGMAX") {
      if (peek().paren_close) throw SExprError(f + " expects 2 arguments", peek().pos);
      SExprPtr child = parse_expr();
      RelId rel = parse_relid(f);
      expect_close(f);
      return std::make_shared<SExpr>(
          SExpr::Superlative{f == "ARGMAX", std::move(child), std::move(rel)});
    }
    if (f == "lt" || f == "le" || f == "gt" || f == "ge") {
      CmpOp op = f == "lt" ? CmpOp::Lt : f == "le" ? CmpOp::Le : f == "gt" ? CmpOp::Gt : CmpOp::Ge;
      RelId rel = parse_relid(f);
      Token v = take();
      if (v.paren_open || v.paren_close) throw SExprError(f + " expects a number", v.pos);
      auto d = Decimal::parse(v.text);
      if (!d) throw SExprError("expected number, got '" + v.text + "'", v.pos);
      expect_close(f);
      return std::make_shared<SExpr>(SExpr::Cmp{op, std::move(rel), Literal::number(*d)});
    }
    if (f == "R") throw SExprError("(R ...) is only valid as a JOIN relation", head.pos);
    throw SExprError("unknown function '" + f + "'", head.pos);
  }

  SExprPtr parse_atom(const Token& t) {
    if (is_operator_token(t.text))
      throw SExprError("reserved token '" + t.text + "' used as identifier", t.pos);
    if (t.text == "TYPE") return sx::type_slot();
    if (t.text == "ENT") return sx::entity_slot();
    if (t.text == "REL")
      throw SExprError("REL placeholder outside relation position", t.pos);
    if (auto d = Decimal::parse(t.text)) return sx::lit(Literal::number(*d));
    if (t.text.rfind("string:", 0) == 0)
      return sx::lit(Literal::string(t.text.substr(7)));
    switch (ids_(t.text)) {
      case IdKind::Type:
        return sx::cls(t.text);
      case IdKind::Relation:
        throw SExprError("relation '" + t.text + "' used in set position", t.pos);
      case IdKind::Entity:
      case IdKind::Unknown:
        return sx::ent(t.text);
    }
    return sx::ent(t.text);
  }

  RelRef parse_relref() {
    const Token& t = peek();
    if (t.paren_open) {
      take();
      Token r = take();
      if (r.text != "R") throw SExprError("expected R in relation reference", r.pos);
      RelId rel = parse_relid("R");
      expect_close("R");
      return {std::move(rel), true};
    }
    return {parse_relid("JOIN"), false};
  }

  RelId parse_relid(const std::string& form) {
    Token t = take();
    if (t.paren_open || t.paren_close)
      throw SExprError(form + " expects a relation identifier", t.pos);
    if (t.text == "REL") return RelId::placeholder();
    if (is_operator_token(t.text) || t.text == "TYPE" || t.text == "ENT")
      throw SExprError("reserved token '" + t.text + "' used as relation", t.pos);
    return RelId::concrete(t.text);
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  const IdClassifier& ids_;
  size_t input_len_;
};

}  // namespace

SExprPtr parse_sexpr(std::string_view text, const IdClassifier& ids) {
  Parser p(tokenize(text), ids, text.size());
  return p.run();
}

SExprPtr parse_sexpr(std::string_view text) {
  static const IdClassifier unknown = [](const std::string&) { return IdKind::Unknown; };
  return parse_sexpr(text, unknown);
}

// ---------------------------------------------------------------------------
// Canonical form

namespace {

void flatten_and(const SExprPtr& e, std::vector<SExprPtr>& ops) {
  if (auto* a = e->as<SExpr::And>()) {
    flatten_and(a->left, ops);
    flatten_and(a->right, ops);
  } else {
    ops.push_back(canonicalize(e));
  }
}

}  // namespace

SExprPtr canonicalize(const SExprPtr& expr) {
  if (auto* a = expr->as<SExpr::And>()) {
    (void)a;
    std::vector<SExprPtr> ops;
    flatten_and(expr, ops);
    std::vector<std::pair<std::string, SExprPtr>> keyed;
    keyed.reserve(ops.size());
    for (auto& op : ops) keyed.emplace_back(print_sexpr(*op), op);
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    SExprPtr out = keyed.back().second;
    for (size_t i = keyed.size() - 1; i-- > 0;) out = sx::conj(keyed[i].second, out);
    return out;
  }
  if (auto* j = expr->as<SExpr::Join>()) {
    SExprPtr c = canonicalize(j->child);
    return c == j->child ? expr : sx::join(j->rel, std::move(c));
  }
  if (auto* c = expr->as<SExpr::Count>()) {
    SExprPtr k = canonicalize(c->child);
    return k == c->child ? expr : sx::count(std::move(k));
  }
  if (auto* s = expr->as<SExpr::Superlative>()) {
    SExprPtr k = canonicalize(s->child);
    if (k == s->child) return expr;
    return std::make_shared<SExpr>(SExpr::Superlative{s->is_max, std::move(k), s->rel});
  }
  return expr;
}

std::string canonical_key(const SExprPtr& expr) { return print_sexpr(*canonicalize(expr)); }

bool is_grounded(const SExpr& expr) {
  if (expr.as<SExpr::TypeSlot>() || expr.as<SExpr::EntitySlot>()) return false;
  if (auto* j = expr.as<SExpr::Join>()) return !j->rel.rel.slot && is_grounded(*j->child);
  if (auto* a = expr.as<SExpr::And>()) return is_grounded(*a->left) && is_grounded(*a->right);
  if (auto* c = expr.as<SExpr::Count>()) return is_grounded(*c->child);
  if (auto* s = expr.as<SExpr::Superlative>()) return !s->rel.slot && is_grounded(*s->child);
  if (auto* c = expr.as<SExpr::Cmp>()) return !c->rel.slot;
  return true;
}

// ---------------------------------------------------------------------------
// Sketches

namespace {

SExprPtr abstract_node(const SExpr& e, SketchSlotCounts& counts) {
  if (e.as<SExpr::Class>()) {
    ++counts.n_types;
    return sx::type_slot();
  }
  if (e.as<SExpr::Entity>()) {
    ++counts.n_entities;
    return sx::entity_slot();
  }
  if (e.as<SExpr::TypeSlot>()) {
    ++counts.n_types;
    return sx::type_slot();
  }
  if (e.as<SExpr::EntitySlot>()) {
    ++counts.n_entities;
    return sx::entity_slot();
  }
  if (auto* l = e.as<SExpr::Lit>()) return sx::lit(l->value);
  if (auto* j = e.as<SExpr::Join>()) {
    ++counts.n_relations;
    return sx::join({RelId::placeholder(), j->rel.inverse}, abstract_node(*j->child, counts));
  }
  if (auto* a = e.as<SExpr::And>()) {
    SExprPtr l = abstract_node(*a->left, counts);
    return sx::conj(std::move(l), abstract_node(*a->right, counts));
  }
  if (auto* c = e.as<SExpr::Count>()) return sx::count(abstract_node(*c->child, counts));
  if (auto* s = e.as<SExpr::Superlative>()) {
    SExprPtr child = abstract_node(*s->child, counts);
    ++counts.n_relations;
    return std::make_shared<SExpr>(SExpr::Superlative{s->is_max, std::move(child), RelId::placeholder()});
  }
  auto* c = e.as<SExpr::Cmp>();
  ++counts.n_relations;
  return std::make_shared<SExpr>(SExpr::Cmp{c->op, RelId::placeholder(), c->value});
}

}  // namespace

Sketch extract_sketch(const SExprPtr& expr) {
  Sketch sk;
  sk.tree = abstract_node(*expr, sk.counts);
  return sk;
}

std::string Sketch::key() const {
  std::string out;
  print_node(*tree, out, true);
  return out;
}

namespace {

SExprPtr fill_literals_rec(const SExprPtr& e, const std::vector<Literal>& numbers, size_t& next,
                           bool& failed) {
  if (auto* l = e->as<SExpr::Lit>()) {
    if (l->value.kind != LitKind::Number) return e;
    if (next >= numbers.size()) {
      failed = true;
      return e;
    }
    return sx::lit(numbers[next++]);
  }
  if (auto* j = e->as<SExpr::Join>())
    return sx::join(j->rel, fill_literals_rec(j->child, numbers, next, failed));
  if (auto* a = e->as<SExpr::And>()) {
    SExprPtr l = fill_literals_rec(a->left, numbers, next, failed);
    return sx::conj(std::move(l), fill_literals_rec(a->right, numbers, next, failed));
  }
  if (auto* c = e->as<SExpr::Count>())
    return sx::count(fill_literals_rec(c->child, numbers, next, failed));
  if (auto* s = e->as<SExpr::Superlative>()) {
    SExprPtr child = fill_literals_rec(s->child, numbers, next, failed);
    return std::make_shared<SExpr>(SExpr::Superlative{s->is_max, std::move(child), s->rel});
  }
  if (auto* c = e->as<SExpr::Cmp>()) {
    if (next >= numbers.size()) {
      failed = true;
      return e;
    }
    return std::make_shared<SExpr>(SExpr::Cmp{c->op, c->rel, numbers[next++]});
  }
  return e;
}

}  // namespace

SExprPtr fill_sketch_literals(const SExprPtr& tree, const std::vector<Literal>& numbers) {
  size_t next = 0;
  bool failed = false;
  SExprPtr out = fill_literals_rec(tree, numbers, next, failed);
  return failed ? nullptr : out;
}

SketchInventory build_sketch_inventory(const std::vector<SExprPtr>& train_lfs) {
  if (train_lfs.empty())
    throw std::invalid_argument("build_sketch_inventory: empty training logical forms");
  std::map<std::string, SketchInventoryEntry> by_key;
  for (const auto& lf : train_lfs) {
    Sketch sk = extract_sketch(canonicalize(lf));
    sk.tree = canonicalize(sk.tree);
    std::string key = sk.key();
    auto it = by_key.find(key);
    if (it == by_key.end())
      by_key.emplace(key, SketchInventoryEntry{key, std::move(sk), 1});
    else
      ++it->second.frequency;
  }
  SketchInventory inv;
  for (auto& [_, entry] : by_key) inv.entries.push_back(std::move(entry));
  std::stable_sort(inv.entries.begin(), inv.entries.end(),
                   [](const SketchInventoryEntry& a, const SketchInventoryEntry& b) {
                     if (a.frequency != b.frequency) return a.frequency > b.frequency;
                     return a.key < b.key;
                   });
  return inv;
}

void save_sketch_inventory(const SketchInventory& inv, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(path + ": cannot open for writing");
  for (const auto& e : inv.entries)
    out << e.frequency << '\t' << e.key << '\t' << print_sexpr(*e.sketch.tree) << '\n';
}

SketchInventory load_sketch_inventory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open");
  SketchInventory inv;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string freq, key, repr;
    if (!std::getline(row, freq, '\t') || !std::getline(row, key, '\t') ||
        !std::getline(row, repr))
      throw DataError(path + ":" + std::to_string(lineno) + ": malformed inventory row");
    SketchInventoryEntry entry;
    entry.key = key;
    entry.frequency = std::stoull(freq);
    entry.sketch = extract_sketch(parse_sexpr(repr));
    inv.entries.push_back(std::move(entry));
  }
  return inv;
}

SchemaUse collect_ids(const SExpr& expr) {
  SchemaUse use;
  std::function<void(const SExpr&)> walk = [&](const SExpr& e) {
    if (auto* c = e.as<SExpr::Class>()) {
      use.types.insert(c->type_id);
    } else if (auto* en = e.as<SExpr::Entity>()) {
      use.entities.insert(en->entity_id);
    } else if (auto* j = e.as<SExpr::Join>()) {
      if (!j->rel.rel.slot) use.relations.insert(j->rel.rel.id);
      walk(*j->child);
    } else if (auto* a = e.as<SExpr::And>()) {
      walk(*a->left);
      walk(*a->right);
    } else if (auto* c2 = e.as<SExpr::Count>()) {
      walk(*c2->child);
    } else if (auto* s = e.as<SExpr::Superlative>()) {
      if (!s->rel.slot) use.relations.insert(s->rel.id);
      walk(*s->child);
    } else if (auto* c3 = e.as<SExpr::Cmp>()) {
      if (!c3->rel.slot) use.relations.insert(c3->rel.id);
    }
  };
  walk(expr);
  return use;
}

}  // namespace retina
