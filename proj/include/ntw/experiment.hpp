#pragma once

// Shared experiment machinery: model fitting on a fit split, the
// noise-tolerant vs naive learning paths, the annotator-accuracy sweep, and
// the enumeration benchmark. Used by both the CLI and the acceptance suite.

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "ntw/annotate.hpp"
#include "ntw/enumerate.hpp"
#include "ntw/inductors.hpp"
#include "ntw/metrics.hpp"
#include "ntw/multitype.hpp"
#include "ntw/ranking.hpp"
#include "ntw/synth.hpp"

namespace ntw {

struct LearnOutcome {
  Wrapper wrapper;
  NodeSet extracted;
  std::vector<RankedWrapper> report;  // empty in naive mode
};

inline LearnOutcome learn_ntw(const Corpus& corpus, const NodeSet& labels, InductorKind kind,
                              Enumerator enumerator, const AnnotatorModel& model,
                              const FeatureModels& models, ScoreMode mode = ScoreMode::full) {
  const Inductor& ind = inductor_for(kind);
  WrapperSpace space = enumerate_wrappers(enumerator, ind, corpus, labels);
  std::vector<RankedWrapper> ranked = rank(corpus, space, labels, model, models, mode);
  if (ranked.empty()) throw InternalError("empty wrapper space");
  LearnOutcome out;
  out.wrapper = ranked.front().wrapper;
  out.extracted = ranked.front().output;
  out.report = std::move(ranked);
  return out;
}

inline LearnOutcome learn_naive(const Corpus& corpus, const NodeSet& labels, InductorKind kind) {
  const Inductor& ind = inductor_for(kind);
  LearnOutcome out;
  out.wrapper = ind.induce(corpus, labels);
  out.extracted = ind.apply(corpus, out.wrapper);
  return out;
}

// One schema-size and one alignment sample per site, from the gold
// segmentation of the given type.
inline FeatureModels fit_models_on_sites(const std::vector<const SiteData*>& sites,
                                         const TypeName& type) {
  std::vector<int> schema_samples, align_samples;
  for (const SiteData* site : sites) {
    const NodeSet& gold = site->gold.of(type);
    if (gold.empty()) continue;
    std::vector<Segment> segs = segment(site->corpus, gold);
    if (segs.empty()) continue;
    schema_samples.push_back(schema_size(segs));
    align_samples.push_back(alignment(segs));
  }
  return FeatureModels::fit(std::move(schema_samples), std::move(align_samples));
}

// Pooled (p, r) estimate across sites: counts are aggregated before the
// ratios are taken.
inline AnnotatorModel pooled_estimate(const std::vector<const SiteData*>& sites,
                                      const std::vector<NodeSet>& labels_per_site,
                                      const TypeName& type) {
  double hits = 0, gold_total = 0, false_hits = 0, non_gold = 0;
  for (size_t i = 0; i < sites.size(); ++i) {
    const NodeSet& gold = sites[i]->gold.of(type);
    hits += static_cast<double>(set_intersect(labels_per_site[i], gold).size());
    gold_total += static_cast<double>(gold.size());
    false_hits += static_cast<double>(set_minus(labels_per_site[i], gold).size());
    non_gold += static_cast<double>(sites[i]->corpus.text_node_count()) -
                static_cast<double>(gold.size());
  }
  if (gold_total == 0) throw NoGold("no gold in fit split");
  AnnotatorModel model;
  model.type = type;
  model.r = clamp_probability(hits / gold_total);
  model.p = clamp_probability(1.0 - false_hits / non_gold);
  return model;
}

struct NoisyAnnotatorConfig {
  double recall = 0.25;
  double precision = 0.95;
  uint64_t seed = 0;
};

// Controlled annotator calibrated to a target precision/recall. Gold nodes
// hit with rate = recall; the false-positive budget implied by the precision
// target lands on the site's trap nodes when it has any (decoration lines
// that look like record fields), otherwise uniformly on non-gold nodes.
inline NodeSet noisy_labels(const SiteData& site, const TypeName& type,
                            const NoisyAnnotatorConfig& cfg) {
  const NodeSet& gold = site.gold.of(type);
  double expected_true = static_cast<double>(gold.size()) * cfg.recall;
  double false_budget = expected_true * (1.0 - cfg.precision) / cfg.precision;

  LabelSet labels = annotate_synthetic(site.corpus, gold, {cfg.recall, 0.0, cfg.seed}, type);
  if (!site.trap_nodes.empty()) {
    double p3 = std::min(0.9, false_budget / static_cast<double>(site.trap_nodes.size()));
    labels.merge(annotate_synthetic(site.corpus, site.trap_nodes, {p3, 0.0, cfg.seed + 1}, type));
  } else {
    double n2 = static_cast<double>(site.corpus.text_node_count()) -
                static_cast<double>(gold.size());
    double p2 = n2 > 0 ? std::min(0.9, false_budget / n2) : 0.0;
    LabelSet noise = annotate_synthetic(site.corpus, gold, {0.0, p2, cfg.seed + 1}, type);
    labels.merge(noise);
  }
  return labels.nodes_of(type);
}

inline double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// --- annotator sweep -----------------------------------------------------------

struct SweepCell {
  double precision = 0;
  double recall = 0;
  double mean_f1 = 0;
  int trials = 0;
};

struct SweepOptions {
  std::vector<double> precision_grid = {0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<double> recall_grid = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  InductorKind kind = InductorKind::xpath;
  Enumerator enumerator = Enumerator::topdown;
  int trials = 0;  // per cell; 0 = one per eval site
  uint64_t seed = 7;
};

// For every (precision, recall) cell, derives per-site hit rates (p1, p2)
// that meet the targets in expectation, annotates, learns with the
// noise-tolerant path, and reports mean F1 over the trials (round-robin over
// the eval sites with fresh annotation seeds).
inline std::vector<SweepCell> run_sweep(const std::vector<const SiteData*>& fit_sites,
                                        const std::vector<const SiteData*>& eval_sites,
                                        const TypeName& type, const SweepOptions& opt) {
  if (eval_sites.empty()) throw InputError("sweep requires eval sites");
  FeatureModels models = fit_models_on_sites(fit_sites, type);
  int trials = opt.trials > 0 ? opt.trials : static_cast<int>(eval_sites.size());
  std::vector<SweepCell> out;
  int cell_index = 0;
  for (double prec : opt.precision_grid) {
    for (double rec : opt.recall_grid) {
      ++cell_index;
      std::vector<double> f1s;
      for (int trial = 0; trial < trials; ++trial) {
        const SiteData* site = eval_sites[static_cast<size_t>(trial) % eval_sites.size()];
        const NodeSet& gold = site->gold.of(type);
        double n1 = static_cast<double>(gold.size());
        double n2 = static_cast<double>(site->corpus.text_node_count()) - n1;
        double p1 = rec;
        double p2 = std::min(0.95, n1 * p1 * (1.0 - prec) / (prec * n2));
        uint64_t seed = splitmix64(opt.seed ^ (static_cast<uint64_t>(cell_index) * 7919 + trial));
        NodeSet labels =
            annotate_synthetic(site->corpus, gold, {p1, p2, seed}, type).nodes_of(type);
        if (labels.empty()) {
          f1s.push_back(0.0);
          continue;
        }
        AnnotatorModel model;
        model.type = type;
        model.p = clamp_probability(1.0 - p2);
        model.r = clamp_probability(p1);
        LearnOutcome outcome =
            learn_ntw(site->corpus, labels, opt.kind, opt.enumerator, model, models);
        f1s.push_back(node_metrics(outcome.extracted, gold).f1);
      }
      out.push_back({prec, rec, mean(f1s), static_cast<int>(f1s.size())});
    }
  }
  return out;
}

// --- enumeration benchmark -------------------------------------------------------

struct BenchRow {
  std::string site_id;
  std::string enumerator;
  size_t label_count = 0;
  int k = 0;
  long long calls = 0;
  double seconds = 0;
  bool bounds_ok = true;  // topdown: calls == k; bottomup: calls <= k*|L|
};

inline std::vector<BenchRow> run_bench(const Corpus& corpus, const NodeSet& labels,
                                       const std::string& site_id, InductorKind kind,
                                       int naive_cap = kNaiveLabelCap) {
  const Inductor& ind = inductor_for(kind);
  std::vector<BenchRow> rows;
  WrapperSpace td = top_down(ind, corpus, labels);
  WrapperSpace bu = bottom_up(ind, corpus, labels);
  int k = td.k();
  rows.push_back({site_id, "topdown", labels.size(), td.k(), td.inductor_calls, td.wall_seconds,
                  td.inductor_calls == td.k()});
  rows.push_back({site_id, "bottomup", labels.size(), bu.k(), bu.inductor_calls, bu.wall_seconds,
                  bu.inductor_calls <= static_cast<long long>(k) * static_cast<long long>(labels.size())});
  if (static_cast<int>(labels.size()) <= naive_cap) {
    WrapperSpace nv = naive_enumerate(ind, corpus, labels, naive_cap);
    rows.push_back({site_id, "naive", labels.size(), nv.k(), nv.inductor_calls, nv.wall_seconds,
                    nv.outputs() == td.outputs() && nv.outputs() == bu.outputs()});
  }
  return rows;
}

}  // namespace ntw
