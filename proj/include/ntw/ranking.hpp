#pragma once

// Probabilistic ranking of candidate wrappers: an annotation-error likelihood
// over the label set plus a structural prior over the record segmentation the
// wrapper induces (schema size and alignment, each scored against a smoothed
// distribution learned from sample sites). Everything is computed in log
// space and depends only on a wrapper's output node set.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ntw/dom.hpp"
#include "ntw/enumerate.hpp"
#include "ntw/errors.hpp"
#include "ntw/labels.hpp"
#include "ntw/rand.hpp"

namespace ntw {

struct AnnotatorModel {
  TypeName type;
  double p = 0.5;  // 1 - P(label | node not extracted)
  double r = 0.5;  // P(label | node extracted)
  bool flipped = false;
};

// |L∩X|·log(r/(1−p)) + |X∖L|·log((1−r)/p); the factors that do not vary
// across wrappers are dropped.
inline double annotation_log_likelihood(const NodeSet& extracted, const NodeSet& labels,
                                        const AnnotatorModel& model) {
  if (model.p <= 0 || model.p >= 1 || model.r <= 0 || model.r >= 1)
    throw DegenerateModel("annotator model requires p, r strictly inside (0,1)");
  auto hits = static_cast<double>(set_intersect(labels, extracted).size());
  auto extras = static_cast<double>(extracted.size()) - hits;
  return hits * std::log(model.r / (1 - model.p)) + extras * std::log((1 - model.r) / model.p);
}

// One token of a record segment. Extracted text nodes may carry a type id
// (> 0) in the multi-type setting; everything else has type 0.
struct Tok {
  std::string sym;
  int type = 0;
  bool operator==(const Tok&) const = default;
};

struct Segment {
  std::vector<Tok> toks;
  int text_count = 0;
  bool page_last = false;  // runs from the page's final extracted node to page end
};

// Token streams and text-node token positions, built once per corpus so that
// scoring many wrappers does not re-serialize pages.
class SegmentIndex {
 public:
  explicit SegmentIndex(const Corpus& corpus) : corpus_(&corpus) {
    streams_.reserve(corpus.docs().size());
    positions_.reserve(corpus.docs().size());
    for (const auto& doc : corpus.docs()) {
      streams_.push_back(text_serialization(doc));
      std::map<int, size_t> pos;
      const TokenStream& ts = streams_.back();
      for (size_t i = 0; i < ts.tokens.size(); ++i)
        if (ts.nodes[i] >= 0) pos[ts.nodes[i]] = i;
      positions_.push_back(std::move(pos));
    }
  }

  const Corpus& corpus() const { return *corpus_; }

  // Segments run from one extracted node to the next within a page; the last
  // segment extends to the end of the page; pages without extracted nodes
  // contribute nothing. type_of assigns type ids to extracted text nodes.
  std::vector<Segment> segments(const NodeSet& extracted,
                                const std::map<NodeRef, int>* type_of = nullptr) const {
    std::vector<Segment> out;
    const auto& docs = corpus_->docs();
    for (size_t d = 0; d < docs.size(); ++d) {
      const Document& doc = docs[d];
      std::vector<size_t> cuts;
      auto it = extracted.lower_bound(NodeRef{doc.page_id, 0});
      for (; it != extracted.end() && it->page_id == doc.page_id; ++it)
        cuts.push_back(positions_[d].at(it->preorder_index));
      if (cuts.empty()) continue;
      std::sort(cuts.begin(), cuts.end());
      const TokenStream& ts = streams_[d];
      for (size_t c = 0; c < cuts.size(); ++c) {
        size_t end = c + 1 < cuts.size() ? cuts[c + 1] : ts.tokens.size();
        Segment seg;
        seg.toks.reserve(end - cuts[c]);
        for (size_t i = cuts[c]; i < end; ++i) {
          Tok tok{ts.tokens[i], 0};
          if (type_of && ts.nodes[i] >= 0) {
            auto t = type_of->find(NodeRef{doc.page_id, ts.nodes[i]});
            if (t != type_of->end()) tok.type = t->second;
          }
          if (tok.sym == kTextToken) ++seg.text_count;
          seg.toks.push_back(std::move(tok));
        }
        seg.page_last = c + 1 == cuts.size();
        out.push_back(std::move(seg));
      }
    }
    return out;
  }

 private:
  const Corpus* corpus_;
  std::vector<TokenStream> streams_;
  std::vector<std::map<int, size_t>> positions_;
};

inline std::vector<Segment> segment(const Corpus& corpus, const NodeSet& extracted) {
  return SegmentIndex(corpus).segments(extracted);
}

namespace detail {

// Zero-cost match: same symbol, and type-compatible (an extracted type only
// matches the same type or an untyped token).
inline bool tok_match(const Tok& a, const Tok& b) {
  if (a.sym != b.sym) return false;
  if (a.type && b.type && a.type != b.type) return false;
  return true;
}

constexpr int kInfCost = 1 << 20;

inline int substitution_cost(const Tok& a, const Tok& b) {
  if (tok_match(a, b)) return 0;
  if (a.sym == b.sym) return kInfCost;  // conflicting extracted types: force indel
  return 1;
}

// Longest common contiguous token run between two segments; returns the
// number of text tokens in it (first maximal run in scan order).
inline int lcs_text_tokens(const Segment& a, const Segment& b) {
  size_t n = a.toks.size(), m = b.toks.size();
  std::vector<int> prev(m + 1, 0), cur(m + 1, 0);
  int best_len = 0;
  size_t best_end_i = 0;
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      if (tok_match(a.toks[i - 1], b.toks[j - 1])) {
        cur[j] = prev[j - 1] + 1;
        if (cur[j] > best_len) {
          best_len = cur[j];
          best_end_i = i;
        }
      } else {
        cur[j] = 0;
      }
    }
    std::swap(prev, cur);
    std::fill(cur.begin(), cur.end(), 0);
  }
  int texts = 0;
  for (size_t i = best_end_i - static_cast<size_t>(best_len); i < best_end_i; ++i)
    texts += a.toks[i].sym == kTextToken ? 1 : 0;
  return texts;
}

inline int edit_distance(const Segment& a, const Segment& b) {
  size_t n = a.toks.size(), m = b.toks.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= m; ++j) {
      int sub = prev[j - 1] + substitution_cost(a.toks[i - 1], b.toks[j - 1]);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace detail

// Median over adjacent segment pairs of the text-node count of their longest
// common token substring; a single segment scores its own text count.
inline int schema_size(const std::vector<Segment>& segments) {
  if (segments.empty()) throw InputError("schema_size requires at least one segment");
  if (segments.size() == 1) return segments[0].text_count;
  std::vector<int> values;
  values.reserve(segments.size() - 1);
  for (size_t i = 0; i + 1 < segments.size(); ++i)
    values.push_back(detail::lcs_text_tokens(segments[i], segments[i + 1]));
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

// Maximum token-level edit distance over segment pairs: all pairs up to 30
// segments, otherwise all adjacent pairs plus a fixed pseudorandom sample.
// Each page's trailing segment extends into page chrome rather than covering
// a full record, so those are compared only when no complete segments exist
// (single-record pages still compare across pages).
inline int alignment(const std::vector<Segment>& segments) {
  if (segments.empty()) throw InputError("alignment requires at least one segment");
  std::vector<const Segment*> core;
  for (const Segment& s : segments)
    if (!s.page_last) core.push_back(&s);
  if (core.size() == 1) return 0;
  if (core.empty())
    for (const Segment& s : segments) core.push_back(&s);

  size_t n = core.size();
  if (n == 1) return 0;
  int worst = 0;
  if (n <= 30) {
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j)
        worst = std::max(worst, detail::edit_distance(*core[i], *core[j]));
    return worst;
  }
  for (size_t i = 0; i + 1 < n; ++i)
    worst = std::max(worst, detail::edit_distance(*core[i], *core[i + 1]));
  Rng rng(0x5eed0fa11 ^ static_cast<uint64_t>(n));
  for (int s = 0; s < 200; ++s) {
    size_t i = rng.below(n);
    size_t j = rng.below(n);
    if (i == j) continue;
    worst = std::max(worst, detail::edit_distance(*core[i], *core[j]));
  }
  return worst;
}

// Gaussian-kernel density over the integers, Silverman bandwidth floored at
// 1, evaluated within [min−3h, max+3h] (clamped to be non-negative), floored
// at ε and renormalized. Queries outside the support return the floor mass.
class FeatureModel {
 public:
  static constexpr double kFloor = 1e-6;

  FeatureModel() = default;

  static FeatureModel fit(std::string name, std::vector<int> samples) {
    if (samples.empty()) throw EmptySample("feature model needs at least one sample");
    FeatureModel m;
    m.name_ = std::move(name);
    m.samples_ = std::move(samples);
    double n = static_cast<double>(m.samples_.size());
    double mean = 0;
    for (int x : m.samples_) mean += x;
    mean /= n;
    double var = 0;
    for (int x : m.samples_) var += (x - mean) * (x - mean);
    double sd = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
    double h = std::max(1.0, 1.06 * sd * std::pow(n, -0.2));

    auto [mn, mx] = std::minmax_element(m.samples_.begin(), m.samples_.end());
    m.lo_ = std::max(0, static_cast<int>(std::floor(*mn - 3 * h)));
    int hi = static_cast<int>(std::ceil(*mx + 3 * h));
    m.raw_.resize(static_cast<size_t>(hi - m.lo_ + 1));
    for (int t = m.lo_; t <= hi; ++t) {
      double acc = 0;
      for (int x : m.samples_) {
        double z = (t - x) / h;
        acc += std::exp(-0.5 * z * z);
      }
      m.raw_[static_cast<size_t>(t - m.lo_)] = std::max(acc, kFloor);
    }
    double total = 0;
    for (double v : m.raw_) total += v;
    m.norm_ = total;
    m.fitted_ = true;
    return m;
  }

  static FeatureModel from_table(std::string name, std::vector<int> samples, int lo,
                                 std::vector<double> raw) {
    FeatureModel m;
    m.name_ = std::move(name);
    m.samples_ = std::move(samples);
    m.lo_ = lo;
    m.raw_ = std::move(raw);
    m.norm_ = 0;
    for (double v : m.raw_) m.norm_ += v;
    m.fitted_ = !m.raw_.empty();
    return m;
  }

  bool fitted() const { return fitted_; }
  const std::string& name() const { return name_; }
  const std::vector<int>& samples() const { return samples_; }
  int support_lo() const { return lo_; }
  int support_hi() const { return lo_ + static_cast<int>(raw_.size()) - 1; }
  const std::vector<double>& raw_mass() const { return raw_; }

  double mass(int v) const {
    check();
    if (v < lo_ || v > support_hi()) return kFloor / norm_;
    return raw_[static_cast<size_t>(v - lo_)] / norm_;
  }

  double log_mass(int v) const { return std::log(mass(v)); }

 private:
  void check() const {
    if (!fitted_) throw UnfittedModel("feature model not fitted");
  }

  std::string name_;
  std::vector<int> samples_;
  int lo_ = 0;
  std::vector<double> raw_;  // floored, pre-normalization
  double norm_ = 1;
  bool fitted_ = false;
};

struct FeatureModels {
  FeatureModel schema;
  FeatureModel align;

  bool fitted() const { return schema.fitted() && align.fitted(); }

  static FeatureModels fit(std::vector<int> schema_samples, std::vector<int> align_samples) {
    FeatureModels m;
    m.schema = FeatureModel::fit("schema_size", std::move(schema_samples));
    m.align = FeatureModel::fit("alignment", std::move(align_samples));
    return m;
  }
};

inline double list_log_prior(const std::vector<Segment>& segments, const FeatureModels& models) {
  if (!models.fitted()) throw UnfittedModel("list prior requires fitted schema and alignment models");
  return models.schema.log_mass(schema_size(segments)) + models.align.log_mass(alignment(segments));
}

enum class ScoreMode { full, likelihood_only, prior_only };

struct RankedWrapper {
  Wrapper wrapper;
  NodeSet output;
  double log_likelihood = 0;
  double log_prior = 0;
  double log_score = 0;
};

// Scores every wrapper in the space on its output and sorts descending.
// Ties break on larger |L∩X|, then smaller |X|, then rule serialization.
inline std::vector<RankedWrapper> rank(const Corpus& corpus, const WrapperSpace& space,
                                       const NodeSet& labels, const AnnotatorModel& model,
                                       const FeatureModels& models,
                                       ScoreMode mode = ScoreMode::full) {
  SegmentIndex index(corpus);
  std::vector<RankedWrapper> out;
  out.reserve(space.entries.size());
  for (const auto& entry : space.entries) {
    RankedWrapper rw;
    rw.wrapper = entry.wrapper;
    rw.output = entry.output;
    rw.log_likelihood = annotation_log_likelihood(entry.output, labels, model);
    if (mode != ScoreMode::likelihood_only) {
      std::vector<Segment> segs = index.segments(entry.output);
      rw.log_prior = segs.empty() ? 2 * std::log(FeatureModel::kFloor)
                                  : list_log_prior(segs, models);
    }
    switch (mode) {
      case ScoreMode::full: rw.log_score = rw.log_likelihood + rw.log_prior; break;
      case ScoreMode::likelihood_only: rw.log_score = rw.log_likelihood; break;
      case ScoreMode::prior_only: rw.log_score = rw.log_prior; break;
    }
    out.push_back(std::move(rw));
  }
  std::sort(out.begin(), out.end(), [&](const RankedWrapper& a, const RankedWrapper& b) {
    if (a.log_score != b.log_score) return a.log_score > b.log_score;
    size_t ha = set_intersect(labels, a.output).size();
    size_t hb = set_intersect(labels, b.output).size();
    if (ha != hb) return ha > hb;
    if (a.output.size() != b.output.size()) return a.output.size() < b.output.size();
    return a.wrapper.canonical() < b.wrapper.canonical();
  });
  return out;
}

}  // namespace ntw
