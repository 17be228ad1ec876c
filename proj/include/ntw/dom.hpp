#pragma once

// Tolerant HTML parsing into immutable, preorder-indexed DOM trees, plus the
// two derived document views used by the inductors: the tag/⟨#text⟩ token
// serialization and the flat character stream with text-node spans.
//
// Normalization ruleset (fixed, stands in for an external tidy step):
//   - tag and attribute names lowercased; attribute values kept verbatim
//   - unclosed tags auto-closed at the parent boundary, plus the usual
//     sibling implicit closes (p/p, li/li, tr/td/th, dt/dd, option)
//   - comments, doctypes, processing instructions, <script> and <style>
//     elements dropped entirely
//   - adjacent text runs coalesced; whitespace runs collapsed to one space;
//     whitespace-only text nodes dropped; entities not decoded
//   - a page with one top-level element keeps it as root; anything else is
//     wrapped in a synthetic html/body pair

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ntw/errors.hpp"

namespace ntw {

enum class NodeKind { element, text };

struct DomNode {
  NodeKind kind = NodeKind::element;
  std::string tag;                                          // elements only
  std::vector<std::pair<std::string, std::string>> attrs;   // elements only
  std::string text;                                         // text nodes only
  std::vector<int> children;                                // preorder indices
  int parent = -1;
  int preorder_index = 0;
  int child_number = 0;  // 1-based among same-tag siblings; elements only

  bool is_text() const { return kind == NodeKind::text; }
  bool is_element() const { return kind == NodeKind::element; }

  const std::string* attr(const std::string& name) const {
    for (const auto& [n, v] : attrs)
      if (n == name) return &v;
    return nullptr;
  }

  bool operator==(const DomNode& o) const {
    return kind == o.kind && tag == o.tag && attrs == o.attrs && text == o.text &&
           children == o.children && parent == o.parent &&
           preorder_index == o.preorder_index && child_number == o.child_number;
  }
};

struct Document {
  std::string page_id;
  std::vector<DomNode> nodes;  // stored in preorder; nodes[0] is the root

  const DomNode& root() const { return nodes.front(); }
  int node_count() const { return static_cast<int>(nodes.size()); }

  const DomNode& node(int preorder_index) const {
    if (preorder_index < 0 || preorder_index >= node_count()) throw BadNodeRef();
    return nodes[static_cast<size_t>(preorder_index)];
  }

  std::vector<int> text_nodes() const {
    std::vector<int> out;
    for (const auto& n : nodes)
      if (n.is_text()) out.push_back(n.preorder_index);
    return out;
  }

  bool operator==(const Document& o) const {
    return page_id == o.page_id && nodes == o.nodes;
  }
};

struct NodeRef {
  std::string page_id;
  int preorder_index = 0;
  auto operator<=>(const NodeRef&) const = default;
};

class Corpus {
 public:
  Corpus() = default;

  void add(Document doc) {
    if (index_.count(doc.page_id)) throw InputError("duplicate page_id: " + doc.page_id);
    index_[doc.page_id] = static_cast<int>(docs_.size());
    docs_.push_back(std::move(doc));
  }

  const std::vector<Document>& docs() const { return docs_; }
  bool empty() const { return docs_.empty(); }

  const Document* find(const std::string& page_id) const {
    auto it = index_.find(page_id);
    return it == index_.end() ? nullptr : &docs_[static_cast<size_t>(it->second)];
  }

  const Document& doc(const std::string& page_id) const {
    const Document* d = find(page_id);
    if (!d) throw UnknownPage("unknown page_id: " + page_id);
    return *d;
  }

  const DomNode& node(const NodeRef& ref) const { return doc(ref.page_id).node(ref.preorder_index); }

  int text_node_count() const {
    int n = 0;
    for (const auto& d : docs_)
      for (const auto& node : d.nodes) n += node.is_text() ? 1 : 0;
    return n;
  }

 private:
  std::vector<Document> docs_;
  std::unordered_map<std::string, int> index_;
};

namespace detail {

inline const std::set<std::string>& void_tags() {
  static const std::set<std::string> v = {"area",  "base", "br",   "col",  "embed",
                                          "hr",    "img",  "input", "link", "meta",
                                          "param", "source", "track", "wbr"};
  return v;
}

inline bool is_void_tag(const std::string& tag) { return void_tags().count(tag) > 0; }

// Tags implicitly closed when `tag` opens while they sit on top of the stack.
inline const std::vector<std::string>* implicit_closes(const std::string& tag) {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"p", {"p"}},
      {"li", {"li"}},
      {"tr", {"tr", "td", "th"}},
      {"td", {"td", "th"}},
      {"th", {"td", "th"}},
      {"dt", {"dt", "dd"}},
      {"dd", {"dt", "dd"}},
      {"option", {"option"}},
      {"thead", {"thead", "tbody", "tfoot", "tr", "td", "th"}},
      {"tbody", {"thead", "tbody", "tfoot", "tr", "td", "th"}},
      {"tfoot", {"thead", "tbody", "tfoot", "tr", "td", "th"}},
  };
  auto it = table.find(tag);
  return it == table.end() ? nullptr : &it->second;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline std::string collapse_whitespace(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  }
  return out;
}

// Replaces invalid UTF-8 sequences with U+FFFD.
inline std::string utf8_lossy(std::string_view bytes) {
  static const char* replacement = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(bytes.size());
  size_t i = 0;
  while (i < bytes.size()) {
    unsigned char c = static_cast<unsigned char>(bytes[i]);
    size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
    bool ok = len > 0 && i + len <= bytes.size();
    for (size_t k = 1; ok && k < len; ++k)
      ok = (static_cast<unsigned char>(bytes[i + k]) & 0xC0) == 0x80;
    if (ok) {
      out.append(bytes.substr(i, len));
      i += len;
    } else {
      out.append(replacement);
      ++i;
    }
  }
  return out;
}

struct TempNode {
  NodeKind kind;
  std::string tag;
  std::vector<std::pair<std::string, std::string>> attrs;
  std::string text;
  std::vector<int> children;
};

class Parser {
 public:
  explicit Parser(std::string_view input) : in_(input) {}

  // Returns indices (into pool) of the top-level nodes.
  std::vector<int> run(std::vector<TempNode>& pool) {
    pool_ = &pool;
    while (pos_ < in_.size()) {
      if (in_[pos_] == '<') {
        if (!consume_markup()) append_text(in_.substr(pos_++, 1));
      } else {
        size_t next = in_.find('<', pos_);
        if (next == std::string_view::npos) next = in_.size();
        append_text(in_.substr(pos_, next - pos_));
        pos_ = next;
      }
    }
    return top_;
  }

 private:
  bool consume_markup() {
    std::string_view rest = in_.substr(pos_);
    if (rest.starts_with("<!--")) {
      size_t end = in_.find("-->", pos_ + 4);
      pos_ = end == std::string_view::npos ? in_.size() : end + 3;
      return true;
    }
    if (rest.size() >= 2 && (rest[1] == '!' || rest[1] == '?')) {
      size_t end = in_.find('>', pos_ + 2);
      pos_ = end == std::string_view::npos ? in_.size() : end + 1;
      return true;
    }
    if (rest.size() >= 2 && rest[1] == '/') return consume_end_tag();
    if (rest.size() >= 2 && std::isalpha(static_cast<unsigned char>(rest[1]))) return consume_start_tag();
    return false;  // stray '<' becomes text
  }

  bool consume_end_tag() {
    size_t p = pos_ + 2;
    size_t start = p;
    while (p < in_.size() && in_[p] != '>' && !is_space(in_[p])) ++p;
    std::string tag = to_lower(in_.substr(start, p - start));
    size_t end = in_.find('>', p);
    pos_ = end == std::string_view::npos ? in_.size() : end + 1;
    // close through the nearest matching open tag; ignore if unmatched
    for (size_t i = stack_.size(); i-- > 0;) {
      if (node(stack_[i]).tag == tag) {
        stack_.resize(i);
        return true;
      }
    }
    return true;
  }

  bool consume_start_tag() {
    size_t p = pos_ + 1;
    size_t start = p;
    while (p < in_.size() && (std::isalnum(static_cast<unsigned char>(in_[p])) || in_[p] == '-' ||
                              in_[p] == '_' || in_[p] == ':')) {
      ++p;
    }
    std::string tag = to_lower(in_.substr(start, p - start));
    std::vector<std::pair<std::string, std::string>> attrs;
    bool self_closing = false;
    while (p < in_.size() && in_[p] != '>') {
      if (is_space(in_[p])) {
        ++p;
        continue;
      }
      if (in_[p] == '/') {
        self_closing = true;
        ++p;
        continue;
      }
      size_t name_start = p;
      while (p < in_.size() && in_[p] != '>' && in_[p] != '=' && in_[p] != '/' && !is_space(in_[p])) ++p;
      std::string name = to_lower(in_.substr(name_start, p - name_start));
      std::string value;
      while (p < in_.size() && is_space(in_[p])) ++p;
      if (p < in_.size() && in_[p] == '=') {
        ++p;
        while (p < in_.size() && is_space(in_[p])) ++p;
        if (p < in_.size() && (in_[p] == '"' || in_[p] == '\'')) {
          char quote = in_[p++];
          size_t vstart = p;
          while (p < in_.size() && in_[p] != quote) ++p;
          value.assign(in_.substr(vstart, p - vstart));
          if (p < in_.size()) ++p;
        } else {
          size_t vstart = p;
          while (p < in_.size() && in_[p] != '>' && !is_space(in_[p])) ++p;
          value.assign(in_.substr(vstart, p - vstart));
        }
      }
      if (!name.empty()) {
        bool dup = false;
        for (const auto& [n, v] : attrs) dup = dup || n == name;
        if (!dup) attrs.emplace_back(std::move(name), std::move(value));
      }
    }
    pos_ = p < in_.size() ? p + 1 : in_.size();

    if (tag.empty()) return true;
    if (tag == "script" || tag == "style") {
      skip_raw_content(tag);
      return true;
    }

    if (const auto* closes = implicit_closes(tag)) {
      while (!stack_.empty() &&
             std::find(closes->begin(), closes->end(), node(stack_.back()).tag) != closes->end()) {
        stack_.pop_back();
      }
    }

    int idx = make_node(NodeKind::element);
    node(idx).tag = tag;
    node(idx).attrs = std::move(attrs);
    attach(idx);
    if (!is_void_tag(tag) && !self_closing) stack_.push_back(idx);
    return true;
  }

  void skip_raw_content(const std::string& tag) {
    std::string needle = "</" + tag;
    size_t p = pos_;
    while (p + needle.size() <= in_.size()) {
      if (to_lower(in_.substr(p, needle.size())) == needle) {
        size_t end = in_.find('>', p);
        pos_ = end == std::string_view::npos ? in_.size() : end + 1;
        return;
      }
      ++p;
    }
    pos_ = in_.size();
  }

  void append_text(std::string_view s) {
    if (s.empty()) return;
    {
      std::vector<int>& siblings = stack_.empty() ? top_ : node(stack_.back()).children;
      if (!siblings.empty() && node(siblings.back()).kind == NodeKind::text) {
        node(siblings.back()).text.append(s);
        return;
      }
    }
    // make_node may reallocate the pool; re-fetch the sibling list after it
    int idx = make_node(NodeKind::text);
    node(idx).text.assign(s);
    (stack_.empty() ? top_ : node(stack_.back()).children).push_back(idx);
  }

  int make_node(NodeKind kind) {
    pool_->push_back(TempNode{kind, {}, {}, {}, {}});
    return static_cast<int>(pool_->size()) - 1;
  }

  void attach(int idx) {
    if (stack_.empty()) {
      top_.push_back(idx);
    } else {
      node(stack_.back()).children.push_back(idx);
    }
  }

  TempNode& node(int idx) { return (*pool_)[static_cast<size_t>(idx)]; }

  std::string_view in_;
  size_t pos_ = 0;
  std::vector<TempNode>* pool_ = nullptr;
  std::vector<int> stack_;  // open elements
  std::vector<int> top_;
};

// Flattens the temp tree into preorder while dropping empty text nodes and
// assigning child numbers.
class Flattener {
 public:
  Flattener(const std::vector<TempNode>& pool, Document& doc) : pool_(pool), doc_(doc) {}

  int emit(int temp_idx, int parent) {
    const TempNode& t = pool_[static_cast<size_t>(temp_idx)];
    int idx = static_cast<int>(doc_.nodes.size());
    doc_.nodes.emplace_back();
    {
      DomNode& n = doc_.nodes.back();
      n.kind = t.kind;
      n.tag = t.tag;
      n.attrs = t.attrs;
      n.text = t.text;
      n.parent = parent;
      n.preorder_index = idx;
    }
    std::map<std::string, int> tag_counts;
    for (int child : pool_[static_cast<size_t>(temp_idx)].children) {
      const TempNode& c = pool_[static_cast<size_t>(child)];
      if (c.kind == NodeKind::text) {
        std::string norm = collapse_whitespace(c.text);
        if (norm.empty()) continue;
        int cidx = static_cast<int>(doc_.nodes.size());
        doc_.nodes.emplace_back();
        DomNode& cn = doc_.nodes.back();
        cn.kind = NodeKind::text;
        cn.text = std::move(norm);
        cn.parent = idx;
        cn.preorder_index = cidx;
        doc_.nodes[static_cast<size_t>(idx)].children.push_back(cidx);
      } else {
        int number = ++tag_counts[c.tag];
        int cidx = emit(child, idx);
        doc_.nodes[static_cast<size_t>(cidx)].child_number = number;
        doc_.nodes[static_cast<size_t>(idx)].children.push_back(cidx);
      }
    }
    return idx;
  }

 private:
  const std::vector<TempNode>& pool_;
  Document& doc_;
};

}  // namespace detail

inline Document parse_html(const std::string& page_id, std::string_view bytes) {
  std::string input = detail::utf8_lossy(bytes);
  std::vector<detail::TempNode> pool;
  detail::Parser parser(input);
  std::vector<int> top = parser.run(pool);

  // Partition top-level nodes; whitespace-only text does not count as content.
  std::vector<int> kept;
  int element_count = 0;
  int text_count = 0;
  for (int idx : top) {
    const detail::TempNode& t = pool[static_cast<size_t>(idx)];
    if (t.kind == NodeKind::text) {
      if (detail::collapse_whitespace(t.text).empty()) continue;
      ++text_count;
    } else {
      ++element_count;
    }
    kept.push_back(idx);
  }
  if (element_count == 0 && text_count == 0) throw EmptyDocument("no content after normalization: " + page_id);

  int root_temp;
  if (element_count == 1 && text_count == 0) {
    root_temp = kept.front();
    for (int idx : kept)
      if (pool[static_cast<size_t>(idx)].kind == NodeKind::element) root_temp = idx;
  } else {
    // synthesize html/body around loose content
    pool.push_back(detail::TempNode{NodeKind::element, "body", {}, {}, kept});
    int body = static_cast<int>(pool.size()) - 1;
    pool.push_back(detail::TempNode{NodeKind::element, "html", {}, {}, {body}});
    root_temp = static_cast<int>(pool.size()) - 1;
  }

  Document doc;
  doc.page_id = page_id;
  detail::Flattener flattener(pool, doc);
  int root = flattener.emit(root_temp, -1);
  doc.nodes[static_cast<size_t>(root)].child_number = 1;
  if (!doc.root().is_element()) throw InternalError("root is not an element");
  return doc;
}

inline constexpr const char* kTextToken = "#text";

struct TokenStream {
  std::vector<std::string> tokens;
  std::vector<int> nodes;  // preorder index of the text node, or -1

  size_t size() const { return tokens.size(); }
};

inline void serialize_tokens(const Document& doc, int idx, TokenStream& out) {
  const DomNode& n = doc.nodes[static_cast<size_t>(idx)];
  if (n.is_text()) {
    out.tokens.emplace_back(kTextToken);
    out.nodes.push_back(n.preorder_index);
    return;
  }
  out.tokens.push_back(n.tag);
  out.nodes.push_back(-1);
  for (int child : n.children) serialize_tokens(doc, child, out);
  if (!detail::is_void_tag(n.tag)) {
    out.tokens.push_back("/" + n.tag);
    out.nodes.push_back(-1);
  }
}

inline TokenStream text_serialization(const Document& doc) {
  TokenStream out;
  out.tokens.reserve(doc.nodes.size() * 2);
  serialize_tokens(doc, 0, out);
  return out;
}

struct CharStream {
  std::string chars;
  struct TextSpan {
    int node = 0;
    size_t begin = 0;
    size_t end = 0;
  };
  std::vector<TextSpan> spans;  // in document order

  const TextSpan* span_of(int node) const {
    for (const auto& s : spans)
      if (s.node == node) return &s;
    return nullptr;
  }
};

inline void serialize_chars(const Document& doc, int idx, CharStream& out) {
  const DomNode& n = doc.nodes[static_cast<size_t>(idx)];
  if (n.is_text()) {
    size_t begin = out.chars.size();
    out.chars += n.text;
    out.spans.push_back({n.preorder_index, begin, out.chars.size()});
    return;
  }
  out.chars += '<';
  out.chars += n.tag;
  for (const auto& [name, value] : n.attrs) {
    out.chars += ' ';
    out.chars += name;
    out.chars += "=\"";
    out.chars += value;
    out.chars += '"';
  }
  out.chars += '>';
  for (int child : n.children) serialize_chars(doc, child, out);
  if (!detail::is_void_tag(n.tag)) {
    out.chars += "</";
    out.chars += n.tag;
    out.chars += '>';
  }
}

// Deterministic re-serialization of the normalized tree; LR delimiters are
// computed over this stream, not the original bytes.
inline CharStream char_stream(const Document& doc) {
  CharStream out;
  out.chars.reserve(doc.nodes.size() * 8);
  serialize_chars(doc, 0, out);
  return out;
}

}  // namespace ntw
