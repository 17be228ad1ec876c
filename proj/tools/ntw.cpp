// ntw — learn site-specific extraction wrappers from noisy annotations.
//
// Subcommands: synth, annotate, learn, extract, evaluate, sweep, bench-enum.
// Exit codes: 0 ok, 2 input error, 3 internal invariant violation.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ntw/ntw.hpp"

namespace {

using namespace ntw;

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<double> split_csv_doubles(const std::string& s) {
  std::vector<double> out;
  for (const std::string& item : split_csv(s)) out.push_back(std::stod(item));
  return out;
}

std::pair<int, int> parse_range(const std::string& s) {
  size_t colon = s.find(':');
  if (colon == std::string::npos) {
    int v = std::stoi(s);
    return {v, v};
  }
  return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
}

json metrics_to_json(const Metrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
          {"tp", m.tp},               {"fp", m.fp},         {"fn", m.fn}};
}

// --- synth ---------------------------------------------------------------------

struct SynthArgs {
  std::string out;
  int sites = 10;
  int pages = 10;
  std::string records = "3:7";
  std::string family = "mixed";
  std::string types = "name,street,zipcode,phone";
  std::string key_type = "name";
  double ambiguous = 0.0;
  int traps = 0;
  double optional_drop = 0.0;
  bool single_entity = false;
  std::string fit_models;
  uint64_t seed = 1;
};

int cmd_synth(const SynthArgs& a) {
  std::vector<SiteData> sites;
  if (a.single_entity) {
    EntityDomainOptions opt;
    opt.pages_per_site = a.pages;
    sites = generate_entity_domain(a.sites, opt, a.seed);
  } else {
    DomainOptions opt;
    opt.family = a.family;
    opt.types = split_csv(a.types);
    opt.key_type = a.key_type;
    opt.pages_per_site = a.pages;
    opt.records_per_page = parse_range(a.records);
    opt.ambiguous_fraction = a.ambiguous;
    opt.trap_lines_per_page = a.traps;
    opt.optional_drop = a.optional_drop;
    sites = generate_domain(a.sites, opt, a.seed);
  }
  write_domain(a.out, sites, a.seed, a.single_entity ? "single-entity" : a.family);
  std::cout << "wrote " << sites.size() << " sites to " << a.out << "\n";

  if (!a.fit_models.empty()) {
    // fit on the first half of the sites, like learning from sample websites
    std::vector<const SiteData*> fit;
    for (size_t i = 0; i < sites.size() / 2 || (fit.empty() && i < sites.size()); ++i)
      fit.push_back(&sites[i]);
    TypeName key = a.single_entity ? "title" : a.key_type;
    FeatureModels models = fit_models_on_sites(fit, key);
    write_file(a.fit_models, models_to_json(models).dump(2) + "\n");
    std::cout << "fitted feature models on " << fit.size() << " sites -> " << a.fit_models << "\n";
  }
  return 0;
}

// --- annotate -------------------------------------------------------------------

struct AnnotateArgs {
  std::string pages;
  std::string type = "name";
  std::string out;
  std::string dictionary;
  std::string pattern;
  bool synthetic = false;
  double p1 = 0.5;
  double p2 = 0.0;
  std::string gold;
  uint64_t seed = 1;
};

int cmd_annotate(const AnnotateArgs& a) {
  Corpus corpus = load_corpus_dir(a.pages);
  LabelSet labels;
  if (!a.dictionary.empty()) {
    std::vector<std::string> entries;
    std::istringstream in(read_file(a.dictionary));
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) entries.push_back(line);
    labels = annotate_dictionary(corpus, DictionaryAnnotator(a.type, entries));
  } else if (!a.pattern.empty()) {
    labels = annotate_pattern(corpus, PatternAnnotator{a.type, a.pattern});
  } else if (a.synthetic) {
    if (a.gold.empty()) throw InputError("--synthetic requires --gold");
    NodeSet gold = read_labels(a.gold).nodes_of(a.type);
    labels = annotate_synthetic(corpus, gold, {a.p1, a.p2, a.seed}, a.type);
  } else {
    throw InputError("choose one of --dictionary, --pattern, --synthetic");
  }
  write_labels(a.out, labels);
  std::cout << "wrote " << labels.size() << " labels to " << a.out << "\n";
  return 0;
}

// --- learn ----------------------------------------------------------------------

struct LearnArgs {
  std::string pages;
  std::string labels;
  std::string inductor = "xpath";
  std::string enumerator = "topdown";
  std::string mode = "ntw";
  std::string score = "full";
  std::string type;
  std::string schema;  // comma-separated: multi-type when > 1
  std::string models;
  double p = 0.0;
  double r = 0.0;
  bool single_entity = false;
  std::string out = "wrapper.json";
  std::string report;
  uint64_t seed = 1;
};

ScoreMode score_mode_from(const std::string& s) {
  if (s == "full") return ScoreMode::full;
  if (s == "likelihood") return ScoreMode::likelihood_only;
  if (s == "prior") return ScoreMode::prior_only;
  throw InputError("unknown score mode: " + s);
}

int cmd_learn(const LearnArgs& a) {
  Corpus corpus = load_corpus_dir(a.pages);
  LabelSet labels = read_labels(a.labels);
  if (labels.empty()) throw EmptyLabelSet("no labels in " + a.labels);
  InductorKind kind = inductor_kind_from(a.inductor);
  Enumerator enumerator = enumerator_from(a.enumerator);
  ScoreMode score = score_mode_from(a.score);

  FeatureModels models;
  std::map<TypeName, AnnotatorModel> annotators;
  if (!a.models.empty()) {
    json j = json::parse(read_file(a.models));
    models = models_from_json(j);
    annotators = annotators_from_json(j);
  }
  auto model_for = [&](const TypeName& type) -> AnnotatorModel {
    if (a.p > 0 && a.r > 0) return AnnotatorModel{type, a.p, a.r};
    auto it = annotators.find(type);
    if (it != annotators.end()) return it->second;
    throw InputError("no annotator model for type " + type + "; pass --p/--r or a models file");
  };

  std::vector<TypeName> schema_types =
      a.schema.empty() ? std::vector<TypeName>{} : split_csv(a.schema);
  bool multitype = schema_types.size() > 1;

  if (a.mode == "naive") {
    if (multitype) {
      RecordSchema schema = RecordSchema::of(schema_types);
      TypedWrapper tw;
      for (const TypeName& type : schema.types) {
        NodeSet typed = labels.nodes_of(type);
        if (typed.empty()) throw MissingType("no labels of type " + type);
        tw.by_type[type] = inductor_for(kind).induce(corpus, typed);
      }
      write_file(a.out, typed_wrapper_to_json(tw, schema).dump(2) + "\n");
    } else {
      TypeName type = a.type.empty() ? labels.types().front() : a.type;
      LearnOutcome outcome = learn_naive(corpus, labels.nodes_of(type), kind);
      write_file(a.out, wrapper_to_json(outcome.wrapper).dump(2) + "\n");
    }
    std::cout << "wrote wrapper to " << a.out << "\n";
    return 0;
  }
  if (a.mode != "ntw") throw InputError("unknown mode: " + a.mode);

  // without fitted feature models the score falls back to the likelihood term
  if (!models.fitted() && score == ScoreMode::full) {
    std::cerr << "note: no feature models given; scoring on the likelihood term only\n";
    score = ScoreMode::likelihood_only;
  }

  if (multitype) {
    RecordSchema schema = RecordSchema::of(schema_types);
    std::map<TypeName, AnnotatorModel> per_type;
    for (const TypeName& type : schema.types) per_type[type] = model_for(type);
    auto spaces = enumerate_multitype(enumerator, inductor_for(kind), corpus, labels, schema);
    auto ranked = rank_multitype(corpus, spaces, labels, per_type, models, schema, 10, score);
    if (ranked.empty()) throw InternalError("empty candidate list");
    write_file(a.out, typed_wrapper_to_json(ranked.front().wrapper, schema).dump(2) + "\n");
    if (!a.report.empty()) {
      std::ostringstream rep;
      for (const auto& cand : ranked) {
        json j = {{"log_likelihood", cand.log_likelihood},
                  {"log_prior", cand.log_prior},
                  {"log_score", cand.log_score},
                  {"assembles_all_pages", cand.assembles_all_pages},
                  {"wrapper", typed_wrapper_to_json(cand.wrapper, schema)}};
        rep << j.dump() << "\n";
      }
      write_file(a.report, rep.str());
    }
    std::cout << "wrote typed wrapper to " << a.out << "\n";
    return 0;
  }

  TypeName type = a.type.empty() ? labels.types().front() : a.type;
  NodeSet typed = labels.nodes_of(type);
  if (typed.empty()) throw MissingType("no labels of type " + type);

  const Inductor& ind = inductor_for(kind);
  WrapperSpace space = enumerate_wrappers(enumerator, ind, corpus, typed);
  Wrapper chosen;
  std::vector<RankedWrapper> ranked;
  if (a.single_entity) {
    std::vector<Wrapper> winners = single_entity_select(space, corpus, typed);
    chosen = winners.front();
    std::cout << winners.size() << " co-maximal single-entity wrapper(s)\n";
  } else {
    ranked = rank(corpus, space, typed, model_for(type), models, score);
    chosen = ranked.front().wrapper;
  }
  write_file(a.out, wrapper_to_json(chosen).dump(2) + "\n");
  if (!a.report.empty()) {
    std::ostringstream rep;
    for (const auto& rw : ranked) {
      json j = {{"log_likelihood", rw.log_likelihood},
                {"log_prior", rw.log_prior},
                {"log_score", rw.log_score},
                {"extracted", rw.output.size()},
                {"wrapper", wrapper_to_json(rw.wrapper)}};
      rep << j.dump() << "\n";
    }
    write_file(a.report, rep.str());
  }
  std::cout << "wrote wrapper (" << chosen.describe() << ") to " << a.out << "\n";
  return 0;
}

// --- extract --------------------------------------------------------------------

struct ExtractArgs {
  std::string pages;
  std::string wrapper;
  std::string out = "extracted.jsonl";
  std::string records;
};

int cmd_extract(const ExtractArgs& a) {
  Corpus corpus = load_corpus_dir(a.pages);
  json j = json::parse(read_file(a.wrapper));
  if (j.contains("types")) {
    auto [tw, schema] = typed_wrapper_from_json(j);
    std::map<TypeName, NodeSet> outputs;
    LabelSet flat;
    for (const auto& [type, w] : tw.by_type) {
      outputs[type] = inductor_for(w.kind).apply(corpus, w);
      for (const auto& ref : outputs[type]) flat.add(ref, type);
    }
    write_labels(a.out, flat);
    if (!a.records.empty()) {
      AssemblyResult assembled = assemble_records(corpus, outputs, schema);
      write_records(a.records, assembled.records, corpus);
      std::cout << assembled.records.size() << " records ("
                << assembled.failures.size() << " failed pages)\n";
    }
  } else {
    Wrapper w = wrapper_from_json(j);
    NodeSet out = inductor_for(w.kind).apply(corpus, w);
    write_nodes(a.out, out, "item");
    std::cout << "extracted " << out.size() << " nodes\n";
  }
  return 0;
}

// --- evaluate -------------------------------------------------------------------

struct EvaluateArgs {
  std::string extracted;
  std::string gold;
  std::string type;
  std::string out;
};

int cmd_evaluate(const EvaluateArgs& a) {
  LabelSet extracted = read_labels(a.extracted);
  LabelSet gold = read_labels(a.gold);
  json report = json::object();
  std::vector<TypeName> types = a.type.empty() ? gold.types() : std::vector<TypeName>{a.type};
  for (const TypeName& type : types) {
    NodeSet g = gold.nodes_of(type);
    NodeSet e = types.size() == 1 && extracted.types().size() == 1 ? extracted.all_nodes()
                                                                   : extracted.nodes_of(type);
    Metrics m = node_metrics(e, g);
    report[type] = metrics_to_json(m);
    std::printf("%-10s precision %.4f recall %.4f f1 %.4f\n", type.c_str(), m.precision, m.recall,
                m.f1);
  }
  if (!a.out.empty()) write_file(a.out, report.dump(2) + "\n");
  return 0;
}

// --- sweep ----------------------------------------------------------------------

struct SweepArgs {
  std::string domain;
  std::string p_grid = "0.1,0.3,0.5,0.7,0.9";
  std::string r_grid = "0.05,0.1,0.15,0.2,0.25,0.3";
  int trials = 0;
  std::string inductor = "xpath";
  std::string type = "name";
  std::string out;
  uint64_t seed = 7;
};

int cmd_sweep(const SweepArgs& a) {
  std::vector<SiteData> sites = load_domain(a.domain);
  std::vector<const SiteData*> fit, eval;
  for (size_t i = 0; i < sites.size(); ++i)
    (i < sites.size() / 2 ? fit : eval).push_back(&sites[i]);
  if (fit.empty()) fit = eval;

  SweepOptions opt;
  opt.precision_grid = split_csv_doubles(a.p_grid);
  opt.recall_grid = split_csv_doubles(a.r_grid);
  opt.kind = inductor_kind_from(a.inductor);
  opt.trials = a.trials;
  opt.seed = a.seed;
  std::vector<SweepCell> cells = run_sweep(fit, eval, a.type, opt);

  std::ostringstream lines;
  for (const SweepCell& c : cells) {
    json j = {{"precision", c.precision}, {"recall", c.recall}, {"mean_f1", c.mean_f1},
              {"trials", c.trials}};
    lines << j.dump() << "\n";
  }
  if (!a.out.empty()) write_file(a.out, lines.str());

  // aligned table, rows = precision, columns = recall
  std::printf("%6s", "p\\r");
  for (double r : opt.recall_grid) std::printf("%8.2f", r);
  std::printf("\n");
  size_t idx = 0;
  for (double p : opt.precision_grid) {
    std::printf("%6.2f", p);
    for (size_t k = 0; k < opt.recall_grid.size(); ++k) std::printf("%8.3f", cells[idx++].mean_f1);
    std::printf("\n");
  }
  return 0;
}

// --- bench-enum -----------------------------------------------------------------

struct BenchArgs {
  std::string domain;
  std::string inductor = "xpath";
  std::string type = "name";
  double p1 = 0.4;
  double p2 = 0.005;
  std::string out;
  uint64_t seed = 11;
};

int cmd_bench(const BenchArgs& a) {
  std::vector<SiteData> sites = load_domain(a.domain);
  InductorKind kind = inductor_kind_from(a.inductor);
  std::ostringstream lines;
  bool all_ok = true;
  for (size_t i = 0; i < sites.size(); ++i) {
    NodeSet labels = annotate_synthetic(sites[i].corpus, sites[i].gold.of(a.type),
                                        {a.p1, a.p2, a.seed + i}, a.type)
                         .nodes_of(a.type);
    if (labels.empty()) continue;
    for (const BenchRow& row : run_bench(sites[i].corpus, labels, sites[i].site_id, kind)) {
      json j = {{"site", row.site_id},       {"enumerator", row.enumerator},
                {"labels", row.label_count}, {"k", row.k},
                {"calls", row.calls},        {"seconds", row.seconds},
                {"bounds_ok", row.bounds_ok}};
      lines << j.dump() << "\n";
      std::printf("%-10s %-9s labels=%-4zu k=%-5d calls=%-6lld %.4fs%s\n", row.site_id.c_str(),
                  row.enumerator.c_str(), row.label_count, row.k, row.calls, row.seconds,
                  row.bounds_ok ? "" : "  BOUND VIOLATION");
      all_ok = all_ok && row.bounds_ok;
    }
  }
  if (!a.out.empty()) write_file(a.out, lines.str());
  if (!all_ok) throw InternalError("enumeration call-count bounds violated");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ntw: noise-tolerant wrapper induction"};
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* s = app.add_subcommand("synth", "generate a synthetic domain with gold extractions");
  s->add_option("--out", synth.out, "output directory")->required();
  s->add_option("--sites", synth.sites, "number of sites");
  s->add_option("--pages", synth.pages, "pages per site");
  s->add_option("--records", synth.records, "records per page, lo:hi");
  s->add_option("--family", synth.family, "mixed|table|div|ul");
  s->add_option("--types", synth.types, "comma-separated record types");
  s->add_option("--key-type", synth.key_type, "record key type");
  s->add_option("--ambiguous", synth.ambiguous, "fraction of delimiter-ambiguous table sites");
  s->add_option("--traps", synth.traps, "gold-like decoration lines per page");
  s->add_option("--optional-drop", synth.optional_drop, "drop probability for non-key fields");
  s->add_flag("--single-entity", synth.single_entity, "one record per page with duplicate titles");
  s->add_option("--fit-models", synth.fit_models, "fit feature models on half the sites");
  s->add_option("--seed", synth.seed, "rng seed");

  AnnotateArgs annotate;
  CLI::App* an = app.add_subcommand("annotate", "produce (noisy) labels for a page directory");
  an->add_option("--pages", annotate.pages, "page directory")->required();
  an->add_option("--type", annotate.type, "label type");
  an->add_option("--out", annotate.out, "labels jsonl")->required();
  an->add_option("--dictionary", annotate.dictionary, "newline-delimited entry file");
  an->add_option("--pattern", annotate.pattern, "regular expression");
  an->add_flag("--synthetic", annotate.synthetic, "controlled synthetic annotator");
  an->add_option("--p1", annotate.p1, "synthetic hit rate on gold nodes");
  an->add_option("--p2", annotate.p2, "synthetic hit rate on non-gold nodes");
  an->add_option("--gold", annotate.gold, "gold jsonl for --synthetic");
  an->add_option("--seed", annotate.seed, "rng seed");

  LearnArgs learn;
  CLI::App* l = app.add_subcommand("learn", "learn a wrapper from labels");
  l->add_option("--pages", learn.pages, "page directory")->required();
  l->add_option("--labels", learn.labels, "labels jsonl")->required();
  l->add_option("--inductor", learn.inductor, "table|lr|xpath");
  l->add_option("--enumerator", learn.enumerator, "bottomup|topdown|naive");
  l->add_option("--mode", learn.mode, "ntw|naive");
  l->add_option("--score", learn.score, "full|likelihood|prior");
  l->add_option("--type", learn.type, "label type (default: sole type in labels)");
  l->add_option("--schema", learn.schema, "comma-separated types for multi-type records");
  l->add_option("--models", learn.models, "feature/annotator models json");
  l->add_option("--p", learn.p, "annotator model p");
  l->add_option("--r", learn.r, "annotator model r");
  l->add_flag("--single-entity", learn.single_entity, "pick the single-entity wrapper");
  l->add_option("--out", learn.out, "wrapper json");
  l->add_option("--report", learn.report, "ranked candidates jsonl");
  l->add_option("--seed", learn.seed, "rng seed");

  ExtractArgs extract;
  CLI::App* x = app.add_subcommand("extract", "apply a wrapper to pages");
  x->add_option("--pages", extract.pages, "page directory")->required();
  x->add_option("--wrapper", extract.wrapper, "wrapper json")->required();
  x->add_option("--out", extract.out, "extracted nodes jsonl");
  x->add_option("--records", extract.records, "assembled records jsonl (typed wrappers)");

  EvaluateArgs evaluate;
  CLI::App* e = app.add_subcommand("evaluate", "precision/recall/F1 of extracted vs gold");
  e->add_option("--extracted", evaluate.extracted, "extracted jsonl")->required();
  e->add_option("--gold", evaluate.gold, "gold jsonl")->required();
  e->add_option("--type", evaluate.type, "restrict to one type");
  e->add_option("--out", evaluate.out, "metrics json");

  SweepArgs sweep;
  CLI::App* sw = app.add_subcommand("sweep", "accuracy as a function of annotator precision/recall");
  sw->add_option("--domain", sweep.domain, "synthetic domain directory")->required();
  sw->add_option("--p-grid", sweep.p_grid, "precision grid, comma-separated");
  sw->add_option("--r-grid", sweep.r_grid, "recall grid, comma-separated");
  sw->add_option("--trials", sweep.trials, "trials per cell (default: one per eval site)");
  sw->add_option("--inductor", sweep.inductor, "table|lr|xpath");
  sw->add_option("--type", sweep.type, "label type");
  sw->add_option("--out", sweep.out, "grid jsonl");
  sw->add_option("--seed", sweep.seed, "rng seed");

  BenchArgs bench;
  CLI::App* b = app.add_subcommand("bench-enum", "compare enumeration call counts");
  b->add_option("--domain", bench.domain, "synthetic domain directory")->required();
  b->add_option("--inductor", bench.inductor, "table|lr|xpath");
  b->add_option("--type", bench.type, "label type");
  b->add_option("--p1", bench.p1, "annotator hit rate on gold");
  b->add_option("--p2", bench.p2, "annotator hit rate off gold");
  b->add_option("--out", bench.out, "rows jsonl");
  b->add_option("--seed", bench.seed, "rng seed");

  try {
    app.parse(argc, argv);
    if (s->parsed()) return cmd_synth(synth);
    if (an->parsed()) return cmd_annotate(annotate);
    if (l->parsed()) return cmd_learn(learn);
    if (x->parsed()) return cmd_extract(extract);
    if (e->parsed()) return cmd_evaluate(evaluate);
    if (sw->parsed()) return cmd_sweep(sweep);
    if (b->parsed()) return cmd_bench(bench);
  } catch (const CLI::ParseError& err) {
    int code = app.exit(err);
    return code == 0 ? 0 : 2;
  } catch (const ntw::InputError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << "\n";
    return 3;
  }
  return 0;
}
