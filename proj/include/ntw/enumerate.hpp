#pragma once

// Enumeration of the wrapper space W(L): every distinct wrapper inducible
// from a subset of the labels, identified by its output node set.
//
//   bottom_up       — blackbox; grows closed subsets from singletons upward;
//                     at most k·|L| inductor calls for k distinct wrappers
//   top_down        — feature-based; splits L by attribute subdivisions and
//                     calls the inductor exactly once per family member
//   naive_enumerate — exhaustive over all non-empty subsets; the oracle

#include <chrono>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ntw/errors.hpp"
#include "ntw/inductors.hpp"
#include "ntw/labels.hpp"

namespace ntw {

struct WrapperSpace {
  struct Entry {
    Wrapper wrapper;
    NodeSet output;      // identity of the wrapper
    NodeSet provenance;  // first label subset that produced it
  };

  std::vector<Entry> entries;  // in discovery order
  long long inductor_calls = 0;
  double wall_seconds = 0;
  std::vector<NodeSet> expansion_trace;  // bottom_up only: subsets expanded

  int k() const { return static_cast<int>(entries.size()); }

  bool add(Wrapper wrapper, NodeSet output, NodeSet provenance) {
    if (by_output_.count(output)) return false;
    by_output_[output] = static_cast<int>(entries.size());
    entries.push_back({std::move(wrapper), std::move(output), std::move(provenance)});
    return true;
  }

  const Entry* find_output(const NodeSet& output) const {
    auto it = by_output_.find(output);
    return it == by_output_.end() ? nullptr : &entries[static_cast<size_t>(it->second)];
  }

  std::set<NodeSet> outputs() const {
    std::set<NodeSet> out;
    for (const auto& e : entries) out.insert(e.output);
    return out;
  }

 private:
  std::map<NodeSet, int> by_output_;
};

// closure of s within L: apply(induce(s)) ∩ L
inline NodeSet closure(const Inductor& inductor, const Corpus& corpus, const NodeSet& s,
                       const NodeSet& labels) {
  Wrapper w = inductor.induce(corpus, s);
  return set_intersect(inductor.apply(corpus, w), labels);
}

// Partition of the attr-bearing members of s by their value of attr.
inline std::vector<NodeSet> subdivision(const Inductor& inductor, const Corpus& corpus,
                                        const NodeSet& s, const std::string& attr) {
  return inductor.subdivide(corpus, s, attr);
}

namespace detail {

struct SmallestFirst {
  bool operator()(const NodeSet& a, const NodeSet& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

inline WrapperSpace bottom_up(const Inductor& inductor, const Corpus& corpus, const NodeSet& labels) {
  if (labels.empty()) throw EmptyLabelSet("bottom_up requires labels");
  detail::Stopwatch timer;
  WrapperSpace space;

  // worklist of candidate subsets, smallest (then lexicographically first)
  // expanded first; the empty set seeds the singleton calls
  std::set<NodeSet, detail::SmallestFirst> worklist;
  std::set<NodeSet> processed;
  worklist.insert(NodeSet{});

  while (!worklist.empty()) {
    NodeSet s = *worklist.begin();
    worklist.erase(worklist.begin());
    space.expansion_trace.push_back(s);

    for (const NodeRef& label : labels) {
      if (s.count(label)) continue;
      NodeSet expanded = s;
      expanded.insert(label);
      Wrapper w = inductor.induce(corpus, expanded);
      ++space.inductor_calls;
      NodeSet output = inductor.apply(corpus, w);
      NodeSet closed = set_intersect(output, labels);
      space.add(std::move(w), std::move(output), expanded);
      if (!processed.count(closed) && !worklist.count(closed)) worklist.insert(std::move(closed));
    }
    processed.insert(std::move(s));
  }

  space.wall_seconds = timer.seconds();
  return space;
}

inline WrapperSpace top_down(const Inductor& inductor, const Corpus& corpus, const NodeSet& labels) {
  if (labels.empty()) throw EmptyLabelSet("top_down requires labels");
  detail::Stopwatch timer;
  WrapperSpace space;
  for (const NodeSet& member : inductor.topdown_family(corpus, labels)) {
    Wrapper w = inductor.induce(corpus, member);
    ++space.inductor_calls;
    NodeSet output = inductor.apply(corpus, w);
    space.add(std::move(w), std::move(output), member);
  }
  space.wall_seconds = timer.seconds();
  return space;
}

inline constexpr int kNaiveLabelCap = 15;

inline WrapperSpace naive_enumerate(const Inductor& inductor, const Corpus& corpus,
                                    const NodeSet& labels, int label_cap = kNaiveLabelCap) {
  if (labels.empty()) throw EmptyLabelSet("naive_enumerate requires labels");
  if (static_cast<int>(labels.size()) > label_cap)
    throw TooManyLabels("naive enumeration capped at " + std::to_string(label_cap) + " labels");
  detail::Stopwatch timer;
  WrapperSpace space;

  std::vector<NodeRef> ordered(labels.begin(), labels.end());
  uint32_t subsets = 1u << ordered.size();
  for (uint32_t mask = 1; mask < subsets; ++mask) {
    NodeSet subset;
    for (size_t i = 0; i < ordered.size(); ++i)
      if (mask & (1u << i)) subset.insert(ordered[i]);
    Wrapper w = inductor.induce(corpus, subset);
    ++space.inductor_calls;
    NodeSet output = inductor.apply(corpus, w);
    space.add(std::move(w), std::move(output), std::move(subset));
  }

  space.wall_seconds = timer.seconds();
  return space;
}

enum class Enumerator { bottomup, topdown, naive };

inline const char* to_string(Enumerator e) {
  switch (e) {
    case Enumerator::bottomup: return "bottomup";
    case Enumerator::topdown: return "topdown";
    case Enumerator::naive: return "naive";
  }
  return "?";
}

inline Enumerator enumerator_from(const std::string& s) {
  if (s == "bottomup") return Enumerator::bottomup;
  if (s == "topdown") return Enumerator::topdown;
  if (s == "naive") return Enumerator::naive;
  throw InputError("unknown enumerator: " + s);
}

inline WrapperSpace enumerate_wrappers(Enumerator e, const Inductor& inductor, const Corpus& corpus,
                                       const NodeSet& labels) {
  switch (e) {
    case Enumerator::bottomup: return bottom_up(inductor, corpus, labels);
    case Enumerator::topdown: return top_down(inductor, corpus, labels);
    case Enumerator::naive: return naive_enumerate(inductor, corpus, labels);
  }
  throw InternalError("bad enumerator");
}

}  // namespace ntw
