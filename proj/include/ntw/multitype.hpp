#pragma once

// Multi-typed records: per-type enumeration, record assembly by segmenting at
// the key type, joint ranking with type-aware alignment, and the single-entity
// selection rule (one node per page, maximal label coverage).

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ntw/enumerate.hpp"
#include "ntw/errors.hpp"
#include "ntw/inductors.hpp"
#include "ntw/labels.hpp"
#include "ntw/metrics.hpp"
#include "ntw/ranking.hpp"

namespace ntw {

struct TypedWrapper {
  std::map<TypeName, Wrapper> by_type;
};

struct Record {
  std::string page_id;
  std::map<TypeName, NodeRef> fields;  // key type always present
  auto operator<=>(const Record&) const = default;
};

struct AssemblyResult {
  struct Failure {
    std::string page_id;
    int segment_index = 0;
    TypeName duplicated;
  };

  std::vector<Record> records;  // in key-node document order
  std::vector<Failure> failures;

  bool all_pages_assembled() const { return failures.empty(); }
};

// Per-type enumeration over that type's labels.
inline std::map<TypeName, WrapperSpace> enumerate_multitype(Enumerator enumerator,
                                                            const Inductor& inductor,
                                                            const Corpus& corpus,
                                                            const LabelSet& labels,
                                                            const RecordSchema& schema) {
  std::map<TypeName, WrapperSpace> out;
  for (const TypeName& type : schema.types) {
    NodeSet typed = labels.nodes_of(type);
    if (typed.empty()) throw MissingType("no labels of type " + type);
    out.emplace(type, enumerate_wrappers(enumerator, inductor, corpus, typed));
  }
  return out;
}

// Segments each page at the key type's nodes (same boundaries as ranking
// segmentation) and emits one record per segment. A page yields no records if
// any of its segments holds two nodes of one type; missing non-key fields are
// fine.
inline AssemblyResult assemble_records(const Corpus& corpus,
                                       const std::map<TypeName, NodeSet>& extracted,
                                       const RecordSchema& schema) {
  auto key_it = extracted.find(schema.key_type);
  if (key_it == extracted.end()) throw MissingType("no extraction for key type " + schema.key_type);
  const NodeSet& keys = key_it->second;

  AssemblyResult result;
  for (const auto& doc : corpus.docs()) {
    std::vector<int> cuts;
    auto it = keys.lower_bound(NodeRef{doc.page_id, 0});
    for (; it != keys.end() && it->page_id == doc.page_id; ++it) cuts.push_back(it->preorder_index);
    if (cuts.empty()) continue;
    std::sort(cuts.begin(), cuts.end());

    std::vector<Record> page_records;
    bool failed = false;
    for (size_t c = 0; c < cuts.size() && !failed; ++c) {
      int lo = cuts[c];
      int hi = c + 1 < cuts.size() ? cuts[c + 1] : doc.node_count();
      Record rec;
      rec.page_id = doc.page_id;
      for (const TypeName& type : schema.types) {
        auto ex = extracted.find(type);
        if (ex == extracted.end()) continue;
        int found = 0;
        for (auto nt = ex->second.lower_bound(NodeRef{doc.page_id, lo});
             nt != ex->second.end() && nt->page_id == doc.page_id && nt->preorder_index < hi; ++nt) {
          ++found;
          rec.fields[type] = *nt;
        }
        if (found > 1) {
          result.failures.push_back({doc.page_id, static_cast<int>(c), type});
          failed = true;
          break;
        }
      }
      if (!failed) page_records.push_back(std::move(rec));
    }
    if (!failed)
      result.records.insert(result.records.end(), page_records.begin(), page_records.end());
  }
  return result;
}

struct RankedTypedWrapper {
  TypedWrapper wrapper;
  std::map<TypeName, NodeSet> outputs;
  double log_likelihood = 0;
  double log_prior = 0;
  double log_score = 0;
  bool assembles_all_pages = false;
};

// Joint ranking over the cross product of the per-type top-m candidates.
// Likelihoods add up across types; the list prior is computed over the
// key-type segmentation with extracted nodes marked by type, so nodes of
// different types cannot align with each other. Candidates that fail record
// assembly on some page rank below all fully-assembling ones.
inline std::vector<RankedTypedWrapper> rank_multitype(
    const Corpus& corpus, const std::map<TypeName, WrapperSpace>& spaces, const LabelSet& labels,
    const std::map<TypeName, AnnotatorModel>& annotators, const FeatureModels& models,
    const RecordSchema& schema, int per_type_cap = 10, ScoreMode mode = ScoreMode::full) {
  // per-type shortlists by single-type score
  std::map<TypeName, std::vector<RankedWrapper>> shortlists;
  for (const TypeName& type : schema.types) {
    auto space = spaces.find(type);
    if (space == spaces.end() || space->second.entries.empty())
      throw MissingType("empty wrapper space for type " + type);
    std::vector<RankedWrapper> ranked =
        rank(corpus, space->second, labels.nodes_of(type), annotators.at(type), models, mode);
    if (static_cast<int>(ranked.size()) > per_type_cap) ranked.resize(static_cast<size_t>(per_type_cap));
    shortlists.emplace(type, std::move(ranked));
  }

  SegmentIndex index(corpus);
  std::vector<RankedTypedWrapper> out;
  std::vector<size_t> pick(schema.types.size(), 0);
  for (;;) {
    RankedTypedWrapper cand;
    std::map<NodeRef, int> type_of;
    double llh = 0;
    for (size_t t = 0; t < schema.types.size(); ++t) {
      const TypeName& type = schema.types[t];
      const RankedWrapper& rw = shortlists.at(type)[pick[t]];
      cand.wrapper.by_type[type] = rw.wrapper;
      cand.outputs[type] = rw.output;
      llh += annotation_log_likelihood(rw.output, labels.nodes_of(type), annotators.at(type));
      for (const auto& ref : rw.output) type_of[ref] = static_cast<int>(t) + 1;
    }
    cand.log_likelihood = llh;
    if (mode != ScoreMode::likelihood_only) {
      std::vector<Segment> segs = index.segments(cand.outputs.at(schema.key_type), &type_of);
      cand.log_prior =
          segs.empty() ? 2 * std::log(FeatureModel::kFloor) : list_log_prior(segs, models);
    }
    switch (mode) {
      case ScoreMode::full: cand.log_score = cand.log_likelihood + cand.log_prior; break;
      case ScoreMode::likelihood_only: cand.log_score = cand.log_likelihood; break;
      case ScoreMode::prior_only: cand.log_score = cand.log_prior; break;
    }
    cand.assembles_all_pages = assemble_records(corpus, cand.outputs, schema).all_pages_assembled();
    out.push_back(std::move(cand));

    // advance the cross-product odometer
    size_t t = 0;
    for (; t < schema.types.size(); ++t) {
      if (++pick[t] < shortlists.at(schema.types[t]).size()) break;
      pick[t] = 0;
    }
    if (t == schema.types.size()) break;
  }

  std::sort(out.begin(), out.end(), [](const RankedTypedWrapper& a, const RankedTypedWrapper& b) {
    if (a.assembles_all_pages != b.assembles_all_pages) return a.assembles_all_pages;
    if (a.log_score != b.log_score) return a.log_score > b.log_score;
    std::string ca, cb;
    for (const auto& [t, w] : a.wrapper.by_type) ca += w.canonical();
    for (const auto& [t, w] : b.wrapper.by_type) cb += w.canonical();
    return ca < cb;
  });
  return out;
}

// Keeps wrappers extracting at most one node per page and at least one node
// on every labeled page, then returns all wrappers covering the maximal
// number of labels (deterministically ordered, best first).
inline std::vector<Wrapper> single_entity_select(const WrapperSpace& space, const Corpus& corpus,
                                                 const NodeSet& labels) {
  std::set<std::string> labeled_pages;
  for (const auto& l : labels) labeled_pages.insert(l.page_id);

  struct Survivor {
    const WrapperSpace::Entry* entry;
    size_t coverage;
  };
  std::vector<Survivor> survivors;
  for (const auto& entry : space.entries) {
    std::map<std::string, int> per_page;
    for (const auto& ref : entry.output) ++per_page[ref.page_id];
    bool ok = true;
    for (const auto& [page, count] : per_page) ok = ok && count <= 1;
    for (const auto& page : labeled_pages) ok = ok && per_page.count(page) > 0;
    if (ok) survivors.push_back({&entry, set_intersect(entry.output, labels).size()});
  }
  if (survivors.empty())
    throw NoSingleEntityWrapper("no wrapper extracts a single node per page");

  size_t best = 0;
  for (const Survivor& s : survivors) best = std::max(best, s.coverage);
  std::vector<Wrapper> winners;
  for (const Survivor& s : survivors)
    if (s.coverage == best) winners.push_back(s.entry->wrapper);
  std::sort(winners.begin(), winners.end(), [&](const Wrapper& a, const Wrapper& b) {
    return a.canonical() < b.canonical();
  });
  return winners;
}

// Record-level scoring: a record counts as correct when the same page carries
// a gold record with identical fields.
inline Metrics record_metrics(const std::vector<Record>& extracted,
                              const std::vector<Record>& gold) {
  if (gold.empty()) throw NoGold("record evaluation requires gold records");
  std::set<Record> gold_set(gold.begin(), gold.end());
  std::set<Record> got(extracted.begin(), extracted.end());
  Metrics m;
  for (const Record& r : got) m.tp += gold_set.count(r) ? 1 : 0;
  m.fp = static_cast<long>(got.size()) - m.tp;
  m.fn = static_cast<long>(gold_set.size()) - m.tp;
  m.precision = got.empty() ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(got.size());
  m.recall = static_cast<double>(m.tp) / static_cast<double>(gold_set.size());
  m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

}  // namespace ntw
