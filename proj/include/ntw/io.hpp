#pragma once

// File formats: labels and gold as JSONL records {page_id, preorder_index,
// type}; wrappers, annotator models, and feature models as JSON documents;
// extracted records as JSONL. Pages load from a directory, one file per page,
// page_id = path relative to the directory.

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ntw/dom.hpp"
#include "ntw/errors.hpp"
#include "ntw/inductors.hpp"
#include "ntw/labels.hpp"
#include "ntw/multitype.hpp"
#include "ntw/ranking.hpp"
#include "ntw/synth.hpp"

namespace ntw {

using json = nlohmann::json;

inline Corpus load_corpus_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw InputError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  Corpus corpus;
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    corpus.add(parse_html(std::filesystem::relative(path, dir).generic_string(), buf.str()));
  }
  if (corpus.empty()) throw InputError("no pages in " + dir.string());
  return corpus;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// --- labels / gold -----------------------------------------------------------

inline void write_labels(const std::filesystem::path& path, const LabelSet& labels) {
  std::ostringstream out;
  for (const auto& l : labels.labels) {
    json j = {{"page_id", l.node.page_id},
              {"preorder_index", l.node.preorder_index},
              {"type", l.type}};
    out << j.dump() << "\n";
  }
  write_file(path, out.str());
}

inline LabelSet read_labels(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  LabelSet out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    out.add({j.at("page_id").get<std::string>(), j.at("preorder_index").get<int>()},
            j.value("type", std::string("item")));
  }
  return out;
}

// --- wrappers ----------------------------------------------------------------

inline json wrapper_to_json(const Wrapper& w) {
  json rule;
  if (w.kind == InductorKind::lr) {
    rule = {{"left", w.lr.left}, {"right", w.lr.right}};
  } else {
    json feats = json::array();
    for (const auto& f : w.features.items()) feats.push_back({f.attribute, f.value});
    rule = {{"features", feats}};
  }
  json trained = json::array();
  for (const auto& ref : w.trained_on)
    trained.push_back({{"page_id", ref.page_id}, {"preorder_index", ref.preorder_index}});
  return {{"inductor", to_string(w.kind)},
          {"rule", rule},
          {"description", w.describe()},
          {"trained_on", trained}};
}

inline Wrapper wrapper_from_json(const json& j) {
  Wrapper w;
  w.kind = inductor_kind_from(j.at("inductor").get<std::string>());
  const json& rule = j.at("rule");
  if (w.kind == InductorKind::lr) {
    w.lr.left = rule.at("left").get<std::string>();
    w.lr.right = rule.at("right").get<std::string>();
  } else {
    std::vector<Feature> feats;
    for (const auto& f : rule.at("features"))
      feats.push_back({f.at(0).get<std::string>(), f.at(1).get<std::string>()});
    w.features = FeatureSet(std::move(feats));
  }
  if (j.contains("trained_on"))
    for (const auto& t : j.at("trained_on"))
      w.trained_on.insert({t.at("page_id").get<std::string>(), t.at("preorder_index").get<int>()});
  return w;
}

inline json typed_wrapper_to_json(const TypedWrapper& tw, const RecordSchema& schema) {
  json types = json::object();
  for (const auto& [type, w] : tw.by_type) types[type] = wrapper_to_json(w);
  return {{"types", types}, {"key_type", schema.key_type}};
}

inline std::pair<TypedWrapper, RecordSchema> typed_wrapper_from_json(const json& j) {
  TypedWrapper tw;
  RecordSchema schema;
  for (const auto& [type, wj] : j.at("types").items()) {
    tw.by_type[type] = wrapper_from_json(wj);
    schema.types.push_back(type);
  }
  schema.key_type = j.at("key_type").get<std::string>();
  if (!schema.has_type(schema.key_type)) throw InputError("key_type missing from wrapper types");
  return {std::move(tw), std::move(schema)};
}

// --- models ------------------------------------------------------------------

inline json feature_model_to_json(const FeatureModel& m) {
  return {{"name", m.name()},
          {"samples", m.samples()},
          {"support_lo", m.support_lo()},
          {"raw_mass", m.raw_mass()}};
}

inline FeatureModel feature_model_from_json(const json& j) {
  std::string name = j.at("name").get<std::string>();
  std::vector<int> samples = j.at("samples").get<std::vector<int>>();
  if (j.contains("raw_mass") && !j.at("raw_mass").empty())
    return FeatureModel::from_table(name, std::move(samples), j.at("support_lo").get<int>(),
                                    j.at("raw_mass").get<std::vector<double>>());
  return FeatureModel::fit(name, std::move(samples));
}

inline json models_to_json(const FeatureModels& m,
                           const std::map<TypeName, AnnotatorModel>& annotators = {}) {
  json j = {{"schema_size", feature_model_to_json(m.schema)},
            {"alignment", feature_model_to_json(m.align)}};
  if (!annotators.empty()) {
    json a = json::object();
    for (const auto& [type, model] : annotators)
      a[type] = {{"type", model.type}, {"p", model.p}, {"r", model.r}, {"flipped", model.flipped}};
    j["annotators"] = a;
  }
  return j;
}

inline FeatureModels models_from_json(const json& j) {
  FeatureModels m;
  m.schema = feature_model_from_json(j.at("schema_size"));
  m.align = feature_model_from_json(j.at("alignment"));
  return m;
}

inline std::map<TypeName, AnnotatorModel> annotators_from_json(const json& j) {
  std::map<TypeName, AnnotatorModel> out;
  if (!j.contains("annotators")) return out;
  for (const auto& [type, a] : j.at("annotators").items()) {
    AnnotatorModel m;
    m.type = a.value("type", type);
    m.p = a.at("p").get<double>();
    m.r = a.at("r").get<double>();
    m.flipped = a.value("flipped", false);
    out[type] = m;
  }
  return out;
}

// --- extraction output --------------------------------------------------------

inline void write_nodes(const std::filesystem::path& path, const NodeSet& nodes,
                        const TypeName& type) {
  std::ostringstream out;
  for (const auto& ref : nodes) {
    json j = {{"page_id", ref.page_id}, {"preorder_index", ref.preorder_index}, {"type", type}};
    out << j.dump() << "\n";
  }
  write_file(path, out.str());
}

inline void write_records(const std::filesystem::path& path, const std::vector<Record>& records,
                          const Corpus& corpus) {
  std::ostringstream out;
  for (const Record& rec : records) {
    json fields = json::object();
    for (const auto& [type, ref] : rec.fields) fields[type] = corpus.node(ref).text;
    json j = {{"page_id", rec.page_id}, {"fields", fields}};
    out << j.dump() << "\n";
  }
  write_file(path, out.str());
}

// --- synthetic domains ---------------------------------------------------------

inline void write_site(const std::filesystem::path& dir, const SiteData& site) {
  for (const auto& [page_id, html] : site.raw_pages) write_file(dir / "pages" / page_id, html);
  LabelSet gold;
  for (const auto& [type, nodes] : site.gold.nodes)
    for (const auto& ref : nodes) gold.add(ref, type);
  write_labels(dir / "gold.jsonl", gold);
  if (!site.trap_nodes.empty()) {
    LabelSet traps;
    for (const auto& ref : site.trap_nodes) traps.add(ref, "trap");
    write_labels(dir / "traps.jsonl", traps);
  }
}

// Rebuilds a SiteData (corpus, gold, traps, schema) from a written site.
inline SiteData load_site(const std::filesystem::path& site_dir, const std::string& site_id,
                          const std::vector<TypeName>& types, const TypeName& key_type) {
  SiteData site;
  site.site_id = site_id;
  site.corpus = load_corpus_dir(site_dir / "pages");
  LabelSet gold = read_labels(site_dir / "gold.jsonl");
  for (const auto& l : gold.labels) site.gold.nodes[l.type].insert(l.node);
  if (std::filesystem::exists(site_dir / "traps.jsonl"))
    site.trap_nodes = read_labels(site_dir / "traps.jsonl").all_nodes();
  site.tmpl.schema.types = types;
  site.tmpl.schema.key_type = key_type;
  return site;
}

inline std::vector<SiteData> load_domain(const std::filesystem::path& dir) {
  json manifest = json::parse(read_file(dir / "manifest.json"));
  std::vector<SiteData> sites;
  for (const auto& entry : manifest.at("sites")) {
    std::string id = entry.at("id").get<std::string>();
    sites.push_back(load_site(dir / id, id, entry.at("types").get<std::vector<TypeName>>(),
                              entry.at("key_type").get<TypeName>()));
  }
  if (sites.empty()) throw InputError("empty domain manifest in " + dir.string());
  return sites;
}

inline void write_domain(const std::filesystem::path& dir, const std::vector<SiteData>& sites,
                         uint64_t seed, const std::string& family) {
  json manifest;
  manifest["seed"] = seed;
  manifest["family"] = family;
  manifest["sites"] = json::array();
  for (const SiteData& site : sites) {
    write_site(dir / site.site_id, site);
    manifest["sites"].push_back({{"id", site.site_id},
                                 {"pages", site.corpus.docs().size()},
                                 {"template_hash", site.template_hash},
                                 {"lr_ambiguous", site.tmpl.lr_ambiguous},
                                 {"key_type", site.tmpl.schema.key_type},
                                 {"types", site.tmpl.schema.types}});
  }
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace ntw
