#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "retina/kb.hpp"

namespace retina {

class SExpr;
using SExprPtr = std::shared_ptr<const SExpr>;

enum class CmpOp { Lt, Le, Gt, Ge };

const char* cmp_op_name(CmpOp op);

// A relation identifier or the REL placeholder of a sketch.
struct RelId {
  std::string id;
  bool slot = false;

  static RelId concrete(std::string id) { return {std::move(id), false}; }
  static RelId placeholder() { return {"", true}; }
  bool operator==(const RelId& o) const { return slot == o.slot && id == o.id; }
};

// Relation reference in a JOIN: forward r prints "r", inverse prints "(R r)".
struct RelRef {
  RelId rel;
  bool inverse = false;

  bool operator==(const RelRef& o) const { return inverse == o.inverse && rel == o.rel; }
};

// Abstract syntax tree of an s-expression logical form. Immutable; children
// are shared. Slot variants (TypeSlot/EntitySlot, RelId::placeholder) only
// appear in sketches.
class SExpr {
 public:
  struct Class {
    std::string type_id;
  };
  struct Entity {
    std::string entity_id;
  };
  struct Lit {
    Literal value;
  };
  struct Join {
    RelRef rel;
    SExprPtr child;
  };
  struct And {
    SExprPtr left, right;
  };
  struct Count {
    SExprPtr child;
  };
  struct Superlative {  // ARGMIN / ARGMAX
    bool is_max = false;
    SExprPtr child;
    RelId rel;
  };
  struct Cmp {
    CmpOp op = CmpOp::Lt;
    RelId rel;
    Literal value;  // number
  };
  struct TypeSlot {};
  struct EntitySlot {};

  using Node = std::variant<Class, Entity, Lit, Join, And, Count, Superlative, Cmp,
                            TypeSlot, EntitySlot>;

  explicit SExpr(Node node) : node_(std::move(node)) {}
  const Node& node() const { return node_; }

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&node_);
  }

 private:
  Node node_;
};

bool operator==(const SExpr& a, const SExpr& b);
inline bool operator!=(const SExpr& a, const SExpr& b) { return !(a == b); }

// Node constructors.
namespace sx {
SExprPtr cls(std::string type_id);
SExprPtr ent(std::string entity_id);
SExprPtr lit(Literal value);
SExprPtr num(const std::string& decimal_text);
SExprPtr join(RelRef rel, SExprPtr child);
SExprPtr join_fwd(std::string relation, SExprPtr child);
SExprPtr join_inv(std::string relation, SExprPtr child);
SExprPtr conj(SExprPtr left, SExprPtr right);
SExprPtr count(SExprPtr child);
SExprPtr argmin(SExprPtr child, std::string relation);
SExprPtr argmax(SExprPtr child, std::string relation);
SExprPtr cmp(CmpOp op, std::string relation, Literal value);
SExprPtr type_slot();
SExprPtr entity_slot();
}  // namespace sx

// Canonical surface syntax, e.g. "(AND university (JOIN (R works_at) c_manning))".
std::string print_sexpr(const SExpr& expr);
inline std::string print_sexpr(const SExprPtr& expr) { return print_sexpr(*expr); }

// Parses surface syntax. Bare identifiers in set position are resolved to
// Class or Entity through the classifier; unknown identifiers default to
// Entity. TYPE / ENT / REL are reserved slot tokens. Throws SExprError.
SExprPtr parse_sexpr(std::string_view text, const IdClassifier& ids);
SExprPtr parse_sexpr(std::string_view text);

// Flattens nested ANDs, sorts operands by printed form, re-nests them
// right-associatively. Idempotent; execution-equivalent to the input.
SExprPtr canonicalize(const SExprPtr& expr);

// print(canonicalize(...)) — the logical-form equality key used for EM,
// deduplication and deterministic ordering.
std::string canonical_key(const SExprPtr& expr);

// True when the tree contains no slot nodes and no REL placeholders.
bool is_grounded(const SExpr& expr);

struct SketchSlotCounts {
  int n_types = 0;
  int n_relations = 0;
  int n_entities = 0;
};

// A logical form with KB-specific identifiers replaced by placeholder
// slots; literals are kept verbatim.
struct Sketch {
  SExprPtr tree;
  SketchSlotCounts counts;

  // Printed form with number literals abstracted to NUM; the cross-question
  // inventory key.
  std::string key() const;
};

// Replaces Class -> TYPE, Entity -> ENT, every relation id -> REL;
// structure and literal values are preserved.
Sketch extract_sketch(const SExprPtr& expr);

// Replaces the k-th number literal (preorder) with numbers[k]. Returns
// nullptr when the tree has more number literals than provided values.
SExprPtr fill_sketch_literals(const SExprPtr& tree, const std::vector<Literal>& numbers);

struct SketchInventoryEntry {
  std::string key;
  Sketch sketch;  // canonicalized representative
  size_t frequency = 0;
};

// Sketch shapes observed in training logical forms, ordered by descending
// frequency then key.
struct SketchInventory {
  std::vector<SketchInventoryEntry> entries;

  bool empty() const { return entries.empty(); }
  size_t size() const { return entries.size(); }
};

SketchInventory build_sketch_inventory(const std::vector<SExprPtr>& train_lfs);

// Inventory file: "<frequency>\t<key>\t<representative print>" per line.
void save_sketch_inventory(const SketchInventory& inv, const std::string& path);
SketchInventory load_sketch_inventory(const std::string& path);

// Identifiers referenced by a logical form, for perturbation relabeling and
// oracle construction.
struct SchemaUse {
  std::set<std::string> types;
  std::set<std::string> relations;
  std::set<std::string> entities;
};
SchemaUse collect_ids(const SExpr& expr);

}  // namespace retina
