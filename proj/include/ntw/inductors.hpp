#pragma once

// The wrapper-inductor abstraction and the three concrete inductors:
//
//   TABLE — toy inductor over table grids; a rule is a (row, col) constraint
//           pair, a single coordinate, or the empty constraint (whole table).
//   LR    — WIEN-style delimiter pairs over the page character stream; the
//           rule is the longest common preceding/following string of the
//           training labels.
//   XPATH — path constraints on ancestor tag names, child numbers, and
//           attributes; the rule is the intersection of label feature sets.
//
// All three are feature-based: TABLE and XPATH materialize feature sets,
// LR exposes its (conceptually unbounded) context features through the
// subdivision/topdown_family hooks instead.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ntw/dom.hpp"
#include "ntw/errors.hpp"
#include "ntw/features.hpp"
#include "ntw/labels.hpp"

namespace ntw {

enum class InductorKind { table, lr, xpath };

inline const char* to_string(InductorKind k) {
  switch (k) {
    case InductorKind::table: return "table";
    case InductorKind::lr: return "lr";
    case InductorKind::xpath: return "xpath";
  }
  return "?";
}

inline InductorKind inductor_kind_from(const std::string& s) {
  if (s == "table") return InductorKind::table;
  if (s == "lr") return InductorKind::lr;
  if (s == "xpath") return InductorKind::xpath;
  throw InputError("unknown inductor kind: " + s);
}

struct LrRule {
  std::string left;
  std::string right;
  auto operator<=>(const LrRule&) const = default;
};

struct Wrapper {
  InductorKind kind = InductorKind::table;
  FeatureSet features;  // rule payload for table and xpath
  LrRule lr;            // rule payload for lr
  NodeSet trained_on;

  std::string describe() const;
  // Stable serialization of the rule, used as the last ranking tie-break.
  std::string canonical() const;
};

inline std::string escape_for_display(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string Wrapper::canonical() const {
  std::string out = to_string(kind);
  if (kind == InductorKind::lr) {
    out += "(\"" + escape_for_display(lr.left) + "\",\"" + escape_for_display(lr.right) + "\")";
  } else {
    out += "{";
    for (const auto& f : features.items()) out += f.attribute + "=" + f.value + ";";
    out += "}";
  }
  return out;
}

inline std::string Wrapper::describe() const {
  if (kind == InductorKind::lr)
    return "lr(left=\"" + escape_for_display(lr.left) + "\", right=\"" + escape_for_display(lr.right) + "\")";
  if (kind == InductorKind::table) {
    const std::string* row = features.value_of("row");
    const std::string* col = features.value_of("col");
    const std::string* pos = features.value_of("pos");
    if (row && col) return "cell(" + *row + "," + *col + ")";
    if (row) return "row " + *row;
    if (col) return "column " + *col;
    if (pos) return "node " + *pos;
    return "whole table";
  }
  return "xpath" + canonical().substr(5);
}

class Inductor {
 public:
  virtual ~Inductor() = default;

  virtual InductorKind kind() const = 0;
  virtual Wrapper induce(const Corpus& corpus, const NodeSet& labels) const = 0;
  virtual NodeSet apply(const Corpus& corpus, const Wrapper& wrapper) const = 0;
  virtual FeatureSet features_of(const Corpus& corpus, const NodeRef& node) const = 0;

  // Attribute names applicable to a label set, in the deterministic order
  // the top-down enumeration processes them.
  virtual std::vector<std::string> attributes_of(const Corpus& corpus, const NodeSet& labels) const;

  // Partitions the attr-bearing members of s by their value of attr.
  virtual std::vector<NodeSet> subdivide(const Corpus& corpus, const NodeSet& s,
                                         const std::string& attr) const;

  // The family Z of label subsets the top-down enumeration calls induce on.
  virtual std::vector<NodeSet> topdown_family(const Corpus& corpus, const NodeSet& labels) const;

  // Feature-route induction: the rule is the intersection of the labels'
  // feature sets. Extensionally equal to induce; kept as a separate code
  // path so tests can cross-check the two.
  virtual Wrapper induce_from_features(const Corpus& corpus, const NodeSet& labels) const;

 protected:
  void check_labels(const Corpus& corpus, const NodeSet& labels) const {
    if (labels.empty()) throw EmptyLabelSet("induce requires a non-empty label set");
    for (const auto& ref : labels)
      if (!corpus.node(ref).is_text()) throw NotTextNode("label is not a text node");
  }
};

// Brute-force application of a feature rule: every text node whose feature
// set contains the rule. Independent of the inductors' own apply routes.
inline NodeSet apply_features(const Inductor& inductor, const Corpus& corpus,
                              const FeatureSet& rule) {
  NodeSet out;
  for (const auto& doc : corpus.docs()) {
    for (const auto& node : doc.nodes) {
      if (!node.is_text()) continue;
      NodeRef ref{doc.page_id, node.preorder_index};
      if (inductor.features_of(corpus, ref).is_superset_of(rule)) out.insert(ref);
    }
  }
  return out;
}

inline Wrapper Inductor::induce_from_features(const Corpus& corpus, const NodeSet& labels) const {
  check_labels(corpus, labels);
  FeatureSet rule;
  bool first = true;
  for (const auto& ref : labels) {
    FeatureSet fs = features_of(corpus, ref);
    rule = first ? fs : rule.intersect(fs);
    first = false;
  }
  Wrapper w;
  w.kind = kind();
  w.features = std::move(rule);
  w.trained_on = labels;
  return w;
}

inline std::vector<std::string> Inductor::attributes_of(const Corpus& corpus,
                                                        const NodeSet& labels) const {
  std::set<std::string> attrs;
  for (const auto& ref : labels) {
    FeatureSet fs = features_of(corpus, ref);
    for (const auto& f : fs.items()) attrs.insert(f.attribute);
  }
  return {attrs.begin(), attrs.end()};
}

inline std::vector<NodeSet> Inductor::subdivide(const Corpus& corpus, const NodeSet& s,
                                                const std::string& attr) const {
  std::map<std::string, NodeSet> groups;
  for (const auto& ref : s) {
    FeatureSet fs = features_of(corpus, ref);
    if (const std::string* v = fs.value_of(attr)) groups[*v].insert(ref);
  }
  std::vector<NodeSet> out;
  out.reserve(groups.size());
  for (auto& [value, members] : groups) out.push_back(std::move(members));
  return out;
}

inline std::vector<NodeSet> Inductor::topdown_family(const Corpus& corpus,
                                                     const NodeSet& labels) const {
  std::vector<NodeSet> family = {labels};
  std::set<NodeSet> seen = {labels};
  for (const std::string& attr : attributes_of(corpus, labels)) {
    size_t snapshot = family.size();
    for (size_t i = 0; i < snapshot; ++i) {
      for (NodeSet& part : subdivide(corpus, family[i], attr)) {
        if (!part.empty() && seen.insert(part).second) family.push_back(std::move(part));
      }
    }
  }
  return family;
}

// ---------------------------------------------------------------------------
// TABLE

class TableInductor final : public Inductor {
 public:
  InductorKind kind() const override { return InductorKind::table; }

  struct CellCoord {
    int row = 0;
    int col = 0;
  };

  // Grid coordinates of a text node: its nearest td/th ancestor's 1-based
  // (row, column) within the nearest enclosing table. Nested tables scope to
  // the innermost one.
  static std::optional<CellCoord> cell_of(const Document& doc, int node_idx) {
    int cell = nearest_ancestor(doc, node_idx, {"td", "th"});
    if (cell < 0) return std::nullopt;
    int row = nearest_ancestor(doc, cell, {"tr"});
    if (row < 0) return std::nullopt;
    int table = nearest_ancestor(doc, row, {"table"});
    if (table < 0) return std::nullopt;

    CellCoord coord;
    int counter = 0;
    count_in_subtree(doc, table, {"tr"}, {"table"}, row, counter);
    coord.row = counter;
    counter = 0;
    count_in_subtree(doc, row, {"td", "th"}, {"table", "tr"}, cell, counter);
    coord.col = counter;
    if (coord.row == 0 || coord.col == 0) return std::nullopt;
    return coord;
  }

  FeatureSet features_of(const Corpus& corpus, const NodeRef& ref) const override {
    const DomNode& n = corpus.node(ref);
    if (!n.is_text()) throw NotTextNode();
    FeatureSet fs;
    if (auto coord = cell_of(corpus.doc(ref.page_id), ref.preorder_index)) {
      fs.insert("row", std::to_string(coord->row));
      fs.insert("col", std::to_string(coord->col));
    } else {
      // off-grid nodes carry a unique position feature so the toy inductor
      // stays total on arbitrary pages
      fs.insert("pos", ref.page_id + ":" + std::to_string(ref.preorder_index));
    }
    return fs;
  }

  // Geometry route: decide cell/row/column/whole-table from the coordinate
  // spans of the labels.
  Wrapper induce(const Corpus& corpus, const NodeSet& labels) const override {
    check_labels(corpus, labels);
    std::set<int> rows, cols;
    int off_grid = 0;
    for (const auto& ref : labels) {
      if (auto coord = cell_of(corpus.doc(ref.page_id), ref.preorder_index)) {
        rows.insert(coord->row);
        cols.insert(coord->col);
      } else {
        ++off_grid;
      }
    }
    Wrapper w;
    w.kind = InductorKind::table;
    w.trained_on = labels;
    if (off_grid == 0) {
      if (rows.size() == 1) w.features.insert("row", std::to_string(*rows.begin()));
      if (cols.size() == 1) w.features.insert("col", std::to_string(*cols.begin()));
    } else if (labels.size() == 1) {
      const NodeRef& ref = *labels.begin();
      w.features.insert("pos", ref.page_id + ":" + std::to_string(ref.preorder_index));
    }
    // any other mix generalizes to the whole table (empty rule)
    return w;
  }

  NodeSet apply(const Corpus& corpus, const Wrapper& wrapper) const override {
    const std::string* row = wrapper.features.value_of("row");
    const std::string* col = wrapper.features.value_of("col");
    const std::string* pos = wrapper.features.value_of("pos");
    NodeSet out;
    for (const auto& doc : corpus.docs()) {
      for (const auto& node : doc.nodes) {
        if (!node.is_text()) continue;
        NodeRef ref{doc.page_id, node.preorder_index};
        if (pos) {
          if (*pos == ref.page_id + ":" + std::to_string(ref.preorder_index)) out.insert(ref);
          continue;
        }
        if (!row && !col) {
          out.insert(ref);
          continue;
        }
        auto coord = cell_of(doc, node.preorder_index);
        if (!coord) continue;
        if (row && std::to_string(coord->row) != *row) continue;
        if (col && std::to_string(coord->col) != *col) continue;
        out.insert(ref);
      }
    }
    return out;
  }

 private:
  static int nearest_ancestor(const Document& doc, int idx, const std::vector<std::string>& tags) {
    int cur = doc.nodes[static_cast<size_t>(idx)].parent;
    while (cur >= 0) {
      const DomNode& n = doc.nodes[static_cast<size_t>(cur)];
      for (const auto& t : tags)
        if (n.tag == t) return cur;
      cur = n.parent;
    }
    return -1;
  }

  // Counts `count_tags` elements in document order within the subtree of
  // `root`, not descending into `barrier` tags; sets counter to the ordinal
  // of `target` when reached.
  static bool count_in_subtree(const Document& doc, int root, const std::vector<std::string>& count_tags,
                               const std::vector<std::string>& barriers, int target, int& counter) {
    int ordinal = 0;
    bool found = false;
    std::function<void(int)> walk = [&](int idx) {
      for (int child : doc.nodes[static_cast<size_t>(idx)].children) {
        if (found) return;
        const DomNode& c = doc.nodes[static_cast<size_t>(child)];
        if (!c.is_element()) continue;
        bool counts = false;
        for (const auto& t : count_tags) counts = counts || c.tag == t;
        if (counts) {
          ++ordinal;
          if (child == target) {
            counter = ordinal;
            found = true;
            return;
          }
        }
        bool barrier = false;
        for (const auto& t : barriers) barrier = barrier || c.tag == t;
        if (!barrier) walk(child);
      }
    };
    walk(root);
    if (!found) counter = 0;
    return found;
  }
};

// ---------------------------------------------------------------------------
// XPATH

class XpathInductor final : public Inductor {
 public:
  InductorKind kind() const override { return InductorKind::xpath; }

  FeatureSet features_of(const Corpus& corpus, const NodeRef& ref) const override {
    const Document& doc = corpus.doc(ref.page_id);
    const DomNode& n = doc.node(ref.preorder_index);
    if (!n.is_text()) throw NotTextNode();
    FeatureSet fs;
    int depth = 1;
    int cur = n.parent;
    while (cur >= 0) {
      const DomNode& a = doc.nodes[static_cast<size_t>(cur)];
      std::string prefix = std::to_string(depth) + ":";
      fs.insert(prefix + "tagname", a.tag);
      fs.insert(prefix + "childnumber", std::to_string(a.child_number));
      for (const auto& [name, value] : a.attrs) fs.insert(prefix + "attr:" + name, value);
      cur = a.parent;
      ++depth;
    }
    return fs;
  }

  Wrapper induce(const Corpus& corpus, const NodeSet& labels) const override {
    return induce_from_features(corpus, labels);
  }

  // Direct path matcher; deliberately does not materialize node feature sets
  // so it can cross-check the feature route.
  NodeSet apply(const Corpus& corpus, const Wrapper& wrapper) const override {
    std::vector<Constraint> constraints = parse_rule(wrapper.features);
    NodeSet out;
    for (const auto& doc : corpus.docs()) {
      std::vector<int> ancestors;
      for (const auto& node : doc.nodes) {
        if (!node.is_text()) continue;
        ancestors.clear();
        for (int cur = node.parent; cur >= 0; cur = doc.nodes[static_cast<size_t>(cur)].parent)
          ancestors.push_back(cur);
        bool ok = true;
        for (const Constraint& c : constraints) {
          if (c.depth < 1 || static_cast<size_t>(c.depth) > ancestors.size()) {
            ok = false;
            break;
          }
          const DomNode& a = doc.nodes[static_cast<size_t>(ancestors[static_cast<size_t>(c.depth - 1)])];
          switch (c.what) {
            case Constraint::tag: ok = a.tag == c.value; break;
            case Constraint::childnumber: ok = std::to_string(a.child_number) == c.value; break;
            case Constraint::attr: {
              const std::string* v = a.attr(c.name);
              ok = v && *v == c.value;
              break;
            }
          }
          if (!ok) break;
        }
        if (ok) out.insert({doc.page_id, node.preorder_index});
      }
    }
    return out;
  }

  // Attributes ordered by (path position, attribute kind) rather than raw
  // string order, so e.g. 2:tagname precedes 10:tagname.
  std::vector<std::string> attributes_of(const Corpus& corpus, const NodeSet& labels) const override {
    std::vector<std::string> attrs = Inductor::attributes_of(corpus, labels);
    std::sort(attrs.begin(), attrs.end(), [](const std::string& a, const std::string& b) {
      int da = std::stoi(a.substr(0, a.find(':')));
      int db = std::stoi(b.substr(0, b.find(':')));
      if (da != db) return da < db;
      return a.substr(a.find(':')) < b.substr(b.find(':'));
    });
    return attrs;
  }

 private:
  struct Constraint {
    int depth;
    enum What { tag, childnumber, attr } what;
    std::string name;
    std::string value;
  };

  static std::vector<Constraint> parse_rule(const FeatureSet& rule) {
    std::vector<Constraint> out;
    for (const auto& f : rule.items()) {
      size_t colon = f.attribute.find(':');
      if (colon == std::string::npos) throw InternalError("malformed xpath feature: " + f.attribute);
      Constraint c;
      c.depth = std::stoi(f.attribute.substr(0, colon));
      std::string rest = f.attribute.substr(colon + 1);
      if (rest == "tagname") {
        c.what = Constraint::tag;
      } else if (rest == "childnumber") {
        c.what = Constraint::childnumber;
      } else if (rest.starts_with("attr:")) {
        c.what = Constraint::attr;
        c.name = rest.substr(5);
      } else {
        throw InternalError("malformed xpath feature: " + f.attribute);
      }
      c.value = f.value;
      out.push_back(std::move(c));
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// LR

class LrInductor final : public Inductor {
 public:
  InductorKind kind() const override { return InductorKind::lr; }

  FeatureSet features_of(const Corpus&, const NodeRef&) const override {
    throw NotFeatureBased("lr context features are not materialized; use subdivision");
  }

  Wrapper induce(const Corpus& corpus, const NodeSet& labels) const override {
    check_labels(corpus, labels);
    std::map<std::string, CharStream> streams;
    std::string left, right;
    bool first = true;
    for (const auto& ref : labels) {
      const CharStream& cs = stream_for(corpus, ref.page_id, streams);
      const CharStream::TextSpan* span = cs.span_of(ref.preorder_index);
      if (!span) throw InternalError("text node missing from char stream");
      std::string prec = cs.chars.substr(0, span->begin);
      std::string foll = cs.chars.substr(span->end);
      if (first) {
        left = std::move(prec);
        right = std::move(foll);
        first = false;
      } else {
        left = common_suffix(left, prec);
        right = common_prefix(right, foll);
      }
    }
    Wrapper w;
    w.kind = InductorKind::lr;
    w.lr = {std::move(left), std::move(right)};
    w.trained_on = labels;
    return w;
  }

  // Every occurrence of the left delimiter is paired with the nearest
  // following occurrence of the right delimiter; a match counts only when it
  // coincides exactly with one text node's span.
  NodeSet apply(const Corpus& corpus, const Wrapper& wrapper) const override {
    const std::string& left = wrapper.lr.left;
    const std::string& right = wrapper.lr.right;
    NodeSet out;
    for (const auto& doc : corpus.docs()) {
      CharStream cs = char_stream(doc);
      std::map<size_t, std::pair<size_t, int>> span_at;  // begin -> (end, node)
      for (const auto& s : cs.spans) span_at[s.begin] = {s.end, s.node};

      std::vector<size_t> right_occ = occurrences(cs.chars, right);
      for (size_t i : occurrences(cs.chars, left)) {
        size_t start = i + left.size();
        auto jt = std::lower_bound(right_occ.begin(), right_occ.end(), start);
        if (jt == right_occ.end()) continue;
        auto st = span_at.find(start);
        if (st != span_at.end() && st->second.first == *jt)
          out.insert({doc.page_id, st->second.second});
      }
    }
    return out;
  }

  Wrapper induce_from_features(const Corpus& corpus, const NodeSet& labels) const override {
    // the intersection of the L_k/R_k context features is exactly the
    // longest-common-delimiter pair
    return induce(corpus, labels);
  }

  std::vector<std::string> attributes_of(const Corpus&, const NodeSet&) const override {
    throw NotFeatureBased("lr context attributes are enumerated lazily");
  }

  // Standalone subdivision by a named context attribute: L_k groups by the
  // length-k string immediately preceding the span, R_k by the length-k
  // string immediately following it.
  std::vector<NodeSet> subdivide(const Corpus& corpus, const NodeSet& s,
                                 const std::string& attr) const override {
    bool left_side;
    size_t k;
    if (attr.starts_with("L_")) {
      left_side = true;
    } else if (attr.starts_with("R_")) {
      left_side = false;
    } else {
      throw NotFeatureBased("unknown lr attribute: " + attr);
    }
    k = static_cast<size_t>(std::stoul(attr.substr(2)));
    std::map<NodeRef, std::string> ctx = contexts(corpus, s, left_side);
    std::map<std::string, NodeSet> groups;
    for (const auto& ref : s) {
      const std::string& c = ctx.at(ref);
      if (c.size() >= k) groups[c.substr(0, k)].insert(ref);
    }
    std::vector<NodeSet> out;
    for (auto& [value, members] : groups) out.push_back(std::move(members));
    return out;
  }

  // Lazy top-down family: refines by progressively longer context strings on
  // each side, adding every distinct group. Equivalent to subdividing by the
  // full L_1..L_n then R_1..R_n attribute families.
  std::vector<NodeSet> topdown_family(const Corpus& corpus, const NodeSet& labels) const override {
    std::vector<NodeSet> family = {labels};
    std::set<NodeSet> seen = {labels};
    for (bool left_side : {true, false}) {
      std::map<NodeRef, std::string> ctx = contexts(corpus, labels, left_side);
      size_t snapshot = family.size();
      for (size_t i = 0; i < snapshot; ++i) expand_groups(family[i], ctx, 0, family, seen);
    }
    return family;
  }

 private:
  static const CharStream& stream_for(const Corpus& corpus, const std::string& page_id,
                                      std::map<std::string, CharStream>& cache) {
    auto it = cache.find(page_id);
    if (it == cache.end()) it = cache.emplace(page_id, char_stream(corpus.doc(page_id))).first;
    return it->second;
  }

  // left side: preceding string reversed (so shared markup is a shared
  // prefix); right side: following string as-is.
  static std::map<NodeRef, std::string> contexts(const Corpus& corpus, const NodeSet& labels,
                                                 bool left_side) {
    std::map<std::string, CharStream> cache;
    std::map<NodeRef, std::string> out;
    for (const auto& ref : labels) {
      const CharStream& cs = stream_for(corpus, ref.page_id, cache);
      const CharStream::TextSpan* span = cs.span_of(ref.preorder_index);
      if (!span) throw NotTextNode("label is not a text node");
      if (left_side) {
        std::string prec = cs.chars.substr(0, span->begin);
        out[ref] = std::string(prec.rbegin(), prec.rend());
      } else {
        out[ref] = cs.chars.substr(span->end);
      }
    }
    return out;
  }

  static void expand_groups(const NodeSet& members, const std::map<NodeRef, std::string>& ctx,
                            size_t depth, std::vector<NodeSet>& family, std::set<NodeSet>& seen) {
    if (members.size() <= 1) return;
    for (;;) {
      std::map<char, NodeSet> groups;
      size_t eligible = 0;
      for (const auto& ref : members) {
        const std::string& c = ctx.at(ref);
        if (c.size() > depth) {
          groups[c[depth]].insert(ref);
          ++eligible;
        }
      }
      if (eligible == 0) return;
      if (groups.size() == 1 && eligible == members.size()) {
        ++depth;  // all members agree here; keep extending the context
        continue;
      }
      for (auto& [ch, group] : groups) {
        if (seen.insert(group).second) {
          family.push_back(group);
          expand_groups(group, ctx, depth + 1, family, seen);
        }
      }
      return;
    }
  }

  static std::vector<size_t> occurrences(const std::string& hay, const std::string& needle) {
    std::vector<size_t> out;
    if (needle.empty()) {
      out.resize(hay.size() + 1);
      for (size_t i = 0; i <= hay.size(); ++i) out[i] = i;
      return out;
    }
    size_t pos = hay.find(needle);
    while (pos != std::string::npos) {
      out.push_back(pos);
      pos = hay.find(needle, pos + 1);
    }
    return out;
  }

  static std::string common_prefix(const std::string& a, const std::string& b) {
    size_t n = std::min(a.size(), b.size());
    size_t i = 0;
    while (i < n && a[i] == b[i]) ++i;
    return a.substr(0, i);
  }

  static std::string common_suffix(const std::string& a, const std::string& b) {
    size_t n = std::min(a.size(), b.size());
    size_t i = 0;
    while (i < n && a[a.size() - 1 - i] == b[b.size() - 1 - i]) ++i;
    return a.substr(a.size() - i);
  }
};

inline const Inductor& inductor_for(InductorKind kind) {
  static const TableInductor table;
  static const LrInductor lr;
  static const XpathInductor xpath;
  switch (kind) {
    case InductorKind::table: return table;
    case InductorKind::lr: return lr;
    case InductorKind::xpath: return xpath;
  }
  throw InternalError("bad inductor kind");
}

}  // namespace ntw
