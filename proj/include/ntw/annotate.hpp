#pragma once

// Automatic, deliberately noisy annotators: dictionary and regex matchers
// over text nodes, a seeded synthetic annotator with controllable hit rates,
// and estimation of the (p, r) annotator model from a gold-labeled sample.

#include <algorithm>
#include <cctype>
#include <regex>
#include <string>
#include <vector>

#include "ntw/dom.hpp"
#include "ntw/errors.hpp"
#include "ntw/labels.hpp"
#include "ntw/rand.hpp"
#include "ntw/ranking.hpp"

namespace ntw {

namespace detail {

inline std::string fold_case(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

inline bool whole_word_contains(const std::string& hay, const std::string& needle) {
  if (needle.empty()) return false;
  size_t pos = hay.find(needle);
  while (pos != std::string::npos) {
    bool left_ok = pos == 0 || !word_char(hay[pos - 1]);
    size_t end = pos + needle.size();
    bool right_ok = end == hay.size() || !word_char(hay[end]);
    if (left_ok && right_ok) return true;
    pos = hay.find(needle, pos + 1);
  }
  return false;
}

}  // namespace detail

struct DictionaryAnnotator {
  TypeName type;
  std::vector<std::string> entries;  // normalized at construction
  bool case_fold = true;

  DictionaryAnnotator(TypeName type_, std::vector<std::string> raw_entries, bool fold = true)
      : type(std::move(type_)), case_fold(fold) {
    for (std::string& e : raw_entries) {
      std::string t = collapse(e);
      if (!t.empty()) entries.push_back(case_fold ? detail::fold_case(t) : t);
    }
    if (entries.empty()) throw InputError("dictionary annotator needs at least one entry");
  }

 private:
  static std::string collapse(const std::string& s) {
    // trim + collapse interior whitespace, same as document normalization
    std::string out;
    bool pending = false;
    for (char c : s) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        pending = !out.empty();
      } else {
        if (pending) out.push_back(' ');
        pending = false;
        out.push_back(c);
      }
    }
    return out;
  }
};

// Labels every text node containing an entry as a whole-word substring.
inline LabelSet annotate_dictionary(const Corpus& corpus, const DictionaryAnnotator& annot) {
  LabelSet out;
  for (const auto& doc : corpus.docs()) {
    for (const auto& node : doc.nodes) {
      if (!node.is_text()) continue;
      std::string text = annot.case_fold ? detail::fold_case(node.text) : node.text;
      for (const auto& entry : annot.entries) {
        if (detail::whole_word_contains(text, entry)) {
          out.add({doc.page_id, node.preorder_index}, annot.type);
          break;
        }
      }
    }
  }
  return out;
}

struct PatternAnnotator {
  TypeName type;
  std::string pattern;
};

inline LabelSet annotate_pattern(const Corpus& corpus, const PatternAnnotator& annot) {
  std::regex re;
  try {
    re = std::regex(annot.pattern);
  } catch (const std::regex_error& e) {
    throw BadPattern(std::string("bad pattern: ") + e.what());
  }
  LabelSet out;
  for (const auto& doc : corpus.docs())
    for (const auto& node : doc.nodes)
      if (node.is_text() && std::regex_search(node.text, re))
        out.add({doc.page_id, node.preorder_index}, annot.type);
  return out;
}

struct SyntheticAnnotatorConfig {
  double p1 = 1.0;  // hit rate on gold nodes (expected recall)
  double p2 = 0.0;  // hit rate on non-gold nodes
  uint64_t seed = 0;
};

// Labels each gold text node independently with probability p1 and each
// non-gold text node with probability p2; deterministic given the seed.
inline LabelSet annotate_synthetic(const Corpus& corpus, const NodeSet& gold,
                                   const SyntheticAnnotatorConfig& cfg,
                                   const TypeName& type = "item") {
  Rng rng(cfg.seed);
  LabelSet out;
  for (const auto& doc : corpus.docs()) {
    for (const auto& node : doc.nodes) {
      if (!node.is_text()) continue;
      NodeRef ref{doc.page_id, node.preorder_index};
      double rate = gold.count(ref) ? cfg.p1 : cfg.p2;
      if (rng.chance(rate)) out.add(std::move(ref), type);
    }
  }
  return out;
}

inline constexpr double kModelClamp = 1e-4;

inline double clamp_probability(double v) {
  return std::min(1.0 - kModelClamp, std::max(kModelClamp, v));
}

// r = |L∩gold| / |gold|; p = 1 − |L∖gold| / (#text − |gold|), clamped away
// from 0/1. A model with 1−p ≥ r labels wrong nodes more readily than right
// ones, so its output (and parameters) get flipped.
//
// With recall_on_annotated_pages_only, recall counts only gold nodes on pages
// carrying at least one label (reporting option, not the default).
inline AnnotatorModel estimate_pr(const NodeSet& labels, const NodeSet& gold, const Corpus& corpus,
                                  const TypeName& type = "item",
                                  bool recall_on_annotated_pages_only = false) {
  if (gold.empty()) throw NoGold("estimate_pr requires gold nodes");
  int total_texts = corpus.text_node_count();
  if (total_texts <= static_cast<int>(gold.size()))
    throw InputError("corpus must contain non-gold text nodes");

  double hit = static_cast<double>(set_intersect(labels, gold).size());
  double gold_total = static_cast<double>(gold.size());
  if (recall_on_annotated_pages_only) {
    std::set<std::string> pages;
    for (const auto& l : labels) pages.insert(l.page_id);
    gold_total = 0;
    hit = 0;
    for (const auto& g : gold) {
      if (!pages.count(g.page_id)) continue;
      ++gold_total;
      hit += labels.count(g) ? 1 : 0;
    }
    if (gold_total == 0) throw NoGold("no gold nodes on annotated pages");
  }
  double false_hits = static_cast<double>(set_minus(labels, gold).size());
  double non_gold = static_cast<double>(total_texts) - static_cast<double>(gold.size());

  AnnotatorModel model;
  model.type = type;
  model.r = clamp_probability(hit / gold_total);
  model.p = clamp_probability(1.0 - false_hits / non_gold);
  if (1.0 - model.p >= model.r) {
    model.p = clamp_probability(1.0 - model.p);
    model.r = clamp_probability(1.0 - model.r);
    model.flipped = true;
    if (1.0 - model.p >= model.r) model.r = clamp_probability(1.0 - model.p + kModelClamp);
  }
  return model;
}

inline AnnotatorModel estimate_pr(const LabelSet& labels, const TypeName& type, const NodeSet& gold,
                                  const Corpus& corpus) {
  return estimate_pr(labels.nodes_of(type), gold, corpus, type);
}

}  // namespace ntw
