#pragma once

// Untyped attribute-value feature structures with unification.  Values are
// immutable trees (atoms, variables, attribute nodes) shared via
// shared_ptr, so unification results can be handed between threads without
// copying.  Variables are integers; structures related by a rule share
// variables, and instantiating a rule renames them fresh.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latchart/core.hpp"

namespace latchart {

struct FeatureNode;
using FeatureNodePtr = std::shared_ptr<const FeatureNode>;

// One feature value: an atom, a variable, or a node of sub-features.
class FeatureValue {
 public:
  enum class Kind { Atom, Var, Node };

  FeatureValue() : kind_(Kind::Node) {}

  static FeatureValue atom(std::string name);
  static FeatureValue var(int id);
  static FeatureValue node(FeatureNodePtr n);

  Kind kind() const { return kind_; }
  bool is_atom() const { return kind_ == Kind::Atom; }
  bool is_var() const { return kind_ == Kind::Var; }
  bool is_node() const { return kind_ == Kind::Node; }

  const std::string& atom_name() const { return atom_; }
  int var_id() const { return var_; }
  const FeatureNode& node_ref() const { return *node_; }
  const FeatureNodePtr& node_ptr() const { return node_; }

 private:
  Kind kind_;
  std::string atom_;
  int var_ = -1;
  FeatureNodePtr node_;
};

// Attribute -> value map; std::map keeps a canonical attribute order.
struct FeatureNode {
  std::map<std::string, FeatureValue> attrs;
};

inline FeatureValue FeatureValue::atom(std::string name) {
  FeatureValue v;
  v.kind_ = Kind::Atom;
  v.atom_ = std::move(name);
  return v;
}

inline FeatureValue FeatureValue::var(int id) {
  FeatureValue v;
  v.kind_ = Kind::Var;
  v.var_ = id;
  return v;
}

inline FeatureValue FeatureValue::node(FeatureNodePtr n) {
  FeatureValue v;
  v.kind_ = Kind::Node;
  v.node_ = std::move(n);
  return v;
}

// Convenience builders (used heavily by grammar loading and tests).
inline FeatureValue make_atom(std::string name) {
  return FeatureValue::atom(std::move(name));
}
inline FeatureValue make_var(int id) { return FeatureValue::var(id); }
inline FeatureValue make_node(
    std::initializer_list<std::pair<const std::string, FeatureValue>> attrs) {
  auto n = std::make_shared<FeatureNode>();
  n->attrs = attrs;
  return FeatureValue::node(std::move(n));
}
inline FeatureValue empty_node() {
  static const FeatureNodePtr empty = std::make_shared<FeatureNode>();
  return FeatureValue::node(empty);
}

// ---------------------------------------------------------------------------
// Unification.

using Subst = std::map<int, FeatureValue>;

// Follows variable bindings; reports the last variable on the chain so the
// caller can rebind it when the target is refined.
inline FeatureValue walk(FeatureValue v, const Subst& s, int* last_var) {
  if (last_var) *last_var = -1;
  while (v.is_var()) {
    auto it = s.find(v.var_id());
    if (it == s.end()) return v;
    if (last_var) *last_var = v.var_id();
    v = it->second;
  }
  return v;
}

inline bool occurs(int id, const FeatureValue& v, const Subst& s) {
  FeatureValue w = walk(v, s, nullptr);
  switch (w.kind()) {
    case FeatureValue::Kind::Var:
      return w.var_id() == id;
    case FeatureValue::Kind::Atom:
      return false;
    case FeatureValue::Kind::Node:
      for (const auto& [attr, val] : w.node_ref().attrs) {
        (void)attr;
        if (occurs(id, val, s)) return true;
      }
      return false;
  }
  return false;
}

// Unifies a with b under substitution s, returning the merged value and
// extending s; nullopt on clash or occurs-check failure.  When two nodes
// merge, variables that led to either operand are rebound to the merged
// node so later unifications see the refinement.
inline std::optional<FeatureValue> merge_values(const FeatureValue& a0,
                                                const FeatureValue& b0,
                                                Subst& s) {
  int va = -1;
  int vb = -1;
  FeatureValue a = walk(a0, s, &va);
  FeatureValue b = walk(b0, s, &vb);

  if (a.is_var() && b.is_var()) {
    if (a.var_id() == b.var_id()) return a;
    s.emplace(a.var_id(), b);
    return b;
  }
  if (a.is_var()) {
    if (occurs(a.var_id(), b, s)) return std::nullopt;
    s.emplace(a.var_id(), b);
    return b;
  }
  if (b.is_var()) {
    if (occurs(b.var_id(), a, s)) return std::nullopt;
    s.emplace(b.var_id(), a);
    return a;
  }
  if (a.is_atom() || b.is_atom()) {
    if (a.is_atom() && b.is_atom() && a.atom_name() == b.atom_name()) return a;
    return std::nullopt;
  }

  // Node vs node: merge attribute-wise.
  auto merged = std::make_shared<FeatureNode>();
  const auto& am = a.node_ref().attrs;
  const auto& bm = b.node_ref().attrs;
  for (const auto& [attr, val] : am) {
    auto it = bm.find(attr);
    if (it == bm.end()) {
      merged->attrs.emplace(attr, val);
    } else {
      auto sub = merge_values(val, it->second, s);
      if (!sub) return std::nullopt;
      merged->attrs.emplace(attr, *sub);
    }
  }
  for (const auto& [attr, val] : bm) {
    if (am.find(attr) == am.end()) merged->attrs.emplace(attr, val);
  }
  FeatureValue result = FeatureValue::node(std::move(merged));
  // Rebind chain-tail variables so aliases observe the merged node.
  if (va >= 0) s[va] = result;
  if (vb >= 0) s[vb] = result;
  return result;
}

// Applies a substitution recursively, leaving unbound variables in place.
inline FeatureValue resolve(const FeatureValue& v, const Subst& s) {
  FeatureValue w = walk(v, s, nullptr);
  if (!w.is_node()) return w;
  if (s.empty()) return w;
  auto out = std::make_shared<FeatureNode>();
  for (const auto& [attr, val] : w.node_ref().attrs)
    out->attrs.emplace(attr, resolve(val, s));
  return FeatureValue::node(std::move(out));
}

// unify(a, b): merged structure, or nullopt on failure.  Symmetric and
// idempotent up to variable renaming.
inline std::optional<FeatureValue> unify(const FeatureValue& a,
                                         const FeatureValue& b) {
  Subst s;
  auto m = merge_values(a, b, s);
  if (!m) return std::nullopt;
  return resolve(*m, s);
}

// Renames every variable id by adding a fixed offset (rule instantiation).
inline FeatureValue rename_vars(const FeatureValue& v, int offset) {
  switch (v.kind()) {
    case FeatureValue::Kind::Atom:
      return v;
    case FeatureValue::Kind::Var:
      return FeatureValue::var(v.var_id() + offset);
    case FeatureValue::Kind::Node: {
      auto out = std::make_shared<FeatureNode>();
      for (const auto& [attr, val] : v.node_ref().attrs)
        out->attrs.emplace(attr, rename_vars(val, offset));
      return FeatureValue::node(std::move(out));
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Canonical text form: atoms print as themselves, nodes as
// [attr=value, ...] in attribute order, variables as #k alpha-renamed in
// traversal order.  Structures that differ only in variable naming print
// identically, which makes this usable as a dedup signature.

namespace detail {
inline void canonical_text_rec(const FeatureValue& v, std::map<int, int>& seen,
                               std::string& out) {
  switch (v.kind()) {
    case FeatureValue::Kind::Atom:
      out += v.atom_name();
      return;
    case FeatureValue::Kind::Var: {
      auto [it, inserted] =
          seen.emplace(v.var_id(), static_cast<int>(seen.size()));
      (void)inserted;
      out += '#';
      out += std::to_string(it->second);
      return;
    }
    case FeatureValue::Kind::Node: {
      out += '[';
      bool first = true;
      for (const auto& [attr, val] : v.node_ref().attrs) {
        if (!first) out += ", ";
        first = false;
        out += attr;
        out += '=';
        canonical_text_rec(val, seen, out);
      }
      out += ']';
      return;
    }
  }
}
}  // namespace detail

inline std::string canonical_text(const FeatureValue& v) {
  std::map<int, int> seen;
  std::string out;
  detail::canonical_text_rec(v, seen, out);
  return out;
}

// Canonical text of a slot sequence under one shared variable renaming, so
// reentrancies across slots stay visible in the signature.
inline std::string canonical_text(const std::vector<FeatureValue>& slots) {
  std::map<int, int> seen;
  std::string out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (i > 0) out += "; ";
    detail::canonical_text_rec(slots[i], seen, out);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quick check: a cheap pre-unification filter.  The signature records the
// category plus the atom found at each configured fast-check path (nullopt
// when the path leads to anything other than an atom).  quick_check may
// only answer false when full unification would provably fail, so paths
// blocked by variables or missing attributes count as free.

struct QuickSig {
  std::string cat;
  std::vector<std::optional<std::string>> atoms;

  bool operator==(const QuickSig& other) const = default;
};

// The value at a dotted path, if the walk stays inside nodes.
inline const FeatureValue* find_path(const FeatureValue& root,
                                     const std::vector<std::string>& path) {
  const FeatureValue* cur = &root;
  for (const auto& attr : path) {
    if (!cur->is_node()) return nullptr;
    const auto& attrs = cur->node_ref().attrs;
    auto it = attrs.find(attr);
    if (it == attrs.end()) return nullptr;
    cur = &it->second;
  }
  return cur;
}

inline QuickSig make_quick_sig(
    const std::string& cat, const FeatureValue& root,
    const std::vector<std::vector<std::string>>& fast_paths) {
  QuickSig sig;
  sig.cat = cat;
  sig.atoms.reserve(fast_paths.size());
  for (const auto& path : fast_paths) {
    const FeatureValue* v = find_path(root, path);
    if (v != nullptr && v->is_atom()) {
      sig.atoms.emplace_back(v->atom_name());
    } else {
      sig.atoms.emplace_back(std::nullopt);
    }
  }
  return sig;
}

// False only when the two signatures prove unification impossible.
inline bool quick_check(const QuickSig& a, const QuickSig& b) {
  if (a.cat != b.cat) return false;
  std::size_t n = std::min(a.atoms.size(), b.atoms.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a.atoms[i] && b.atoms[i] && *a.atoms[i] != *b.atoms[i]) return false;
  }
  return true;
}

}  // namespace latchart
