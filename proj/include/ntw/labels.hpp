#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "ntw/dom.hpp"
#include "ntw/errors.hpp"

namespace ntw {

using TypeName = std::string;

using NodeSet = std::set<NodeRef>;

struct Label {
  NodeRef node;
  TypeName type;
  auto operator<=>(const Label&) const = default;
};

struct LabelSet {
  std::set<Label> labels;

  void add(NodeRef node, TypeName type) { labels.insert({std::move(node), std::move(type)}); }

  bool empty() const { return labels.empty(); }
  size_t size() const { return labels.size(); }

  std::vector<TypeName> types() const {
    std::set<TypeName> seen;
    for (const auto& l : labels) seen.insert(l.type);
    return {seen.begin(), seen.end()};
  }

  NodeSet nodes_of(const TypeName& type) const {
    NodeSet out;
    for (const auto& l : labels)
      if (l.type == type) out.insert(l.node);
    return out;
  }

  NodeSet all_nodes() const {
    NodeSet out;
    for (const auto& l : labels) out.insert(l.node);
    return out;
  }

  void merge(const LabelSet& other) { labels.insert(other.labels.begin(), other.labels.end()); }
};

struct RecordSchema {
  std::vector<TypeName> types;
  TypeName key_type;

  static RecordSchema of(std::vector<TypeName> types) {
    if (types.empty()) throw InputError("schema needs at least one type");
    RecordSchema s;
    s.key_type = types.front();
    s.types = std::move(types);
    return s;
  }

  bool has_type(const TypeName& t) const {
    return std::find(types.begin(), types.end(), t) != types.end();
  }
};

inline NodeSet set_union(const NodeSet& a, const NodeSet& b) {
  NodeSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

inline NodeSet set_intersect(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

inline NodeSet set_minus(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

inline bool is_subset(const NodeSet& a, const NodeSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace ntw
