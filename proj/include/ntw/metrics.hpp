#pragma once

#include "ntw/errors.hpp"
#include "ntw/labels.hpp"

namespace ntw {

struct Metrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  long tp = 0, fp = 0, fn = 0;
};

inline Metrics node_metrics(const NodeSet& extracted, const NodeSet& gold) {
  if (gold.empty()) throw NoGold("evaluation requires non-empty gold");
  Metrics m;
  m.tp = static_cast<long>(set_intersect(extracted, gold).size());
  m.fp = static_cast<long>(extracted.size()) - m.tp;
  m.fn = static_cast<long>(gold.size()) - m.tp;
  m.precision = extracted.empty() ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(extracted.size());
  m.recall = static_cast<double>(m.tp) / static_cast<double>(gold.size());
  m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

}  // namespace ntw
