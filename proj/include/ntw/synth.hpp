#pragma once

// Synthetic script-generated websites with known gold extractions. Pages of
// one site share a template; different sites get different templates. The
// generator also plants controlled hazards: decoration lines whose text looks
// like record fields (traps for annotators) and table layouts in which the
// record field shares its local markup with a sibling cell, so that no
// delimiter-pair wrapper can isolate it.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ntw/dom.hpp"
#include "ntw/errors.hpp"
#include "ntw/labels.hpp"
#include "ntw/rand.hpp"

namespace ntw {

struct FieldSpec {
  TypeName type;
  std::string generator;  // name | street | zipcode | phone | category | title
  std::string wrap_tag;   // optional inline tag around the field text
  std::vector<std::pair<std::string, std::string>> wrap_attrs;
  double drop_probability = 0.0;
};

struct SiteTemplate {
  RecordSchema schema;
  std::vector<FieldSpec> fields;  // one per schema type, same order
  std::string layout = "table";   // table | div | ul
  std::string container_class = "listing";
  std::string record_class = "record";
  bool header = true;
  int nav_links = 3;
  bool footer = true;
  int trap_lines_per_page = 0;    // gold-like decoration lines per page
  std::string trap_tag = "h3";
  std::string trap_wrap_tag;      // mirrors the key field's wrap tag when set
  int decoy_records_per_page = 0; // regular-looking mini-records in a promo box
  bool lr_ambiguous = false;      // bare-cell key field between bare cells
  // single-entity extras: duplicate the key text in other locations
  bool duplicate_key_in_meta = false;     // consistent block on every page
  double duplicate_key_in_comment = 0.0;  // chance of a comment mentioning it
  std::string site_name = "site";
  uint64_t seed = 0;
};

struct GoldSet {
  std::map<TypeName, NodeSet> nodes;

  const NodeSet& of(const TypeName& type) const {
    static const NodeSet empty;
    auto it = nodes.find(type);
    return it == nodes.end() ? empty : it->second;
  }

  NodeSet all() const {
    NodeSet out;
    for (const auto& [t, set] : nodes) out.insert(set.begin(), set.end());
    return out;
  }
};

struct SiteData {
  std::string site_id;
  SiteTemplate tmpl;
  Corpus corpus;
  GoldSet gold;
  NodeSet trap_nodes;
  std::vector<std::pair<std::string, std::string>> raw_pages;  // page_id -> html
  uint64_t template_hash = 0;
};

namespace synthgen {

inline const std::vector<std::string>& name_first() {
  static const std::vector<std::string> v = {
      "PORTER",  "WOODLAND", "ASHFORD", "CALDWELL", "MERIDIAN", "HARLOW",  "STERLING",
      "BRADFORD","LANGLEY",  "WHITMORE", "KENDALL",  "FAIRMONT", "DOVER",   "ELMWOOD",
      "GRANITE", "SUMMIT",   "LAUREL",   "REDWOOD",  "CRESCENT", "MAPLETON"};
  return v;
}

inline const std::vector<std::string>& name_second() {
  static const std::vector<std::string> v = {"FURNITURE", "MOTORS", "SUPPLY",    "HARDWARE",
                                             "GALLERY",   "DEPOT",  "INTERIORS", "DESIGNS",
                                             "OUTFITTERS", "TRADING"};
  return v;
}

inline std::string gen_name(Rng& rng) {
  return name_first()[rng.below(name_first().size())] + " " +
         name_second()[rng.below(name_second().size())];
}

inline std::string gen_street(Rng& rng) {
  static const std::vector<std::string> roads = {"Main", "Oak",    "Hill",   "Union",
                                                 "Market", "Cedar", "Spring", "Lake"};
  static const std::vector<std::string> kinds = {"St.", "Ave.", "Rd.", "Way", "Blvd"};
  // some street numbers are five digits: deliberate zip-pattern noise
  std::string number = rng.chance(0.12) ? std::to_string(rng.range(10000, 99999))
                                        : std::to_string(rng.range(100, 999));
  return number + " " + roads[rng.below(roads.size())] + " " + kinds[rng.below(kinds.size())];
}

inline std::string gen_zip(Rng& rng) {
  static const std::vector<std::string> cities = {"NEW ALBANY", "MADISON",  "FULTON", "CLINTON",
                                                  "BRISTOL",    "NORWOOD",  "DAYTON", "SALEM"};
  static const std::vector<std::string> states = {"MS", "TX", "OH", "VA", "TN", "KY"};
  return cities[rng.below(cities.size())] + ", " + states[rng.below(states.size())] + " " +
         std::to_string(rng.range(10000, 99999));
}

inline std::string gen_phone(Rng& rng) {
  auto digits = [&](int n, bool lead_nonzero) {
    std::string s;
    for (int i = 0; i < n; ++i)
      s += static_cast<char>('0' + rng.range(i == 0 && lead_nonzero ? 2 : 0, 9));
    return s;
  };
  return digits(3, true) + "-" + digits(3, false) + "-" + digits(4, false);
}

inline std::string gen_category(Rng& rng) {
  static const std::vector<std::string> v = {"Sofas",   "Lighting", "Outdoor", "Bedding",
                                             "Rugs",    "Storage",  "Decor",   "Office",
                                             "Kitchen", "Seasonal"};
  return v[rng.below(v.size())];
}

inline std::string gen_title(Rng& rng) {
  static const std::vector<std::string> a = {"Evening", "Silver", "Broken",  "Golden",
                                             "Quiet",   "Velvet", "Distant", "Paper"};
  static const std::vector<std::string> b = {"Roads",  "Harbor", "Letters", "Season",
                                             "Garden", "Mirror", "Signals", "Lanterns"};
  return a[rng.below(a.size())] + " " + b[rng.below(b.size())];
}

inline std::string gen_field(const std::string& generator, Rng& rng) {
  if (generator == "name") return gen_name(rng);
  if (generator == "street") return gen_street(rng);
  if (generator == "zipcode") return gen_zip(rng);
  if (generator == "phone") return gen_phone(rng);
  if (generator == "category") return gen_category(rng);
  if (generator == "title") return gen_title(rng);
  throw BadTemplate("unknown field generator: " + generator);
}

// Emits HTML while tracking the ordinal (in document order) of every text it
// writes; the ordinals are matched to preorder text nodes after parsing.
class PageBuilder {
 public:
  void open(const std::string& tag,
            const std::vector<std::pair<std::string, std::string>>& attrs = {}) {
    html_ += "<" + tag;
    for (const auto& [k, v] : attrs) html_ += " " + k + "=\"" + v + "\"";
    html_ += ">";
    stack_.push_back(tag);
  }

  void close() {
    html_ += "</" + stack_.back() + ">";
    stack_.pop_back();
  }

  int text(const std::string& content) {
    html_ += content;
    return ordinal_++;
  }

  void raw(const std::string& markup) { html_ += markup; }

  const std::string& html() const { return html_; }
  int text_count() const { return ordinal_; }

 private:
  std::string html_;
  std::vector<std::string> stack_;
  int ordinal_ = 0;
};

}  // namespace synthgen

inline uint64_t template_hash(const SiteTemplate& t) {
  std::string blob = t.layout + "|" + t.container_class + "|" + t.record_class + "|" +
                     t.trap_tag + "|" + std::to_string(t.trap_lines_per_page) + "|" +
                     std::to_string(t.nav_links) + "|" + (t.lr_ambiguous ? "amb" : "reg") + "|";
  for (const auto& f : t.fields) {
    blob += f.type + ":" + f.generator + ":" + f.wrap_tag + ":";
    for (const auto& [k, v] : f.wrap_attrs) blob += k + "=" + v + ",";
    blob += "|";
  }
  blob += t.header ? "h" : "-";
  blob += t.footer ? "f" : "-";
  return hash_str(blob);
}

inline SiteData generate_site(const SiteTemplate& tmpl, int pages,
                              std::pair<int, int> records_per_page) {
  if (pages < 1) throw BadTemplate("site needs at least one page");
  if (tmpl.fields.size() != tmpl.schema.types.size())
    throw BadTemplate("field specs must match schema types");
  if (records_per_page.first < 1 || records_per_page.second < records_per_page.first)
    throw BadTemplate("bad records-per-page range");
  for (size_t i = 0; i < tmpl.fields.size(); ++i) {
    if (tmpl.fields[i].type != tmpl.schema.types[i])
      throw BadTemplate("field order must match schema order");
    if (tmpl.fields[i].type == tmpl.schema.key_type && tmpl.fields[i].drop_probability > 0)
      throw BadTemplate("key field may not be dropped");
  }

  Rng site_rng(tmpl.seed);
  SiteData site;
  site.site_id = tmpl.site_name;
  site.tmpl = tmpl;
  site.template_hash = template_hash(tmpl);

  for (int p = 0; p < pages; ++p) {
    Rng rng = site_rng.fork(static_cast<uint64_t>(p) + 1);
    synthgen::PageBuilder b;
    std::map<TypeName, std::vector<int>> gold_ordinals;
    std::vector<int> trap_ordinals;
    std::vector<std::string> key_texts;  // for duplicate blocks

    b.open("html");
    b.open("body");

    if (tmpl.header) {
      b.open("div", {{"class", "header"}});
      b.open("h1");
      b.text(tmpl.site_name + " dealer directory");
      b.close();
      for (int t = 0; t < tmpl.trap_lines_per_page; ++t) {
        b.open(tmpl.trap_tag, {{"class", "promo"}});
        if (!tmpl.trap_wrap_tag.empty()) b.open(tmpl.trap_wrap_tag);
        trap_ordinals.push_back(b.text(synthgen::gen_name(rng)));
        if (!tmpl.trap_wrap_tag.empty()) b.close();
        b.close();
      }
      b.close();
    }
    if (tmpl.nav_links > 0) {
      static const std::vector<std::string> links = {"Home", "About", "Locations", "Contact", "Help"};
      b.open("ul", {{"class", "nav"}});
      for (int i = 0; i < tmpl.nav_links && i < static_cast<int>(links.size()); ++i) {
        b.open("li");
        b.text(links[static_cast<size_t>(i)]);
        b.close();
      }
      b.close();
    }
    if (tmpl.decoy_records_per_page > 0) {
      // a second, perfectly regular list of field-like texts; its name lines
      // count as trap nodes
      b.open("div", {{"class", "promo-box"}});
      b.open("ul", {{"class", "promo-list"}});
      for (int d = 0; d < tmpl.decoy_records_per_page; ++d) {
        b.open("li");
        if (!tmpl.trap_wrap_tag.empty()) b.open(tmpl.trap_wrap_tag);
        trap_ordinals.push_back(b.text(synthgen::gen_name(rng)));
        if (!tmpl.trap_wrap_tag.empty()) b.close();
        b.open("span");
        b.text(synthgen::gen_street(rng));
        b.close();
        b.open("span");
        b.text(synthgen::gen_zip(rng));
        b.close();
        b.open("span");
        b.text(synthgen::gen_phone(rng));
        b.close();
        b.close();
      }
      b.close();
      b.close();
    }

    int records = static_cast<int>(rng.range(records_per_page.first, records_per_page.second));
    auto emit_field = [&](const FieldSpec& field) {
      if (field.drop_probability > 0 && rng.chance(field.drop_probability)) return;
      std::string value = synthgen::gen_field(field.generator, rng);
      if (field.type == tmpl.schema.key_type) key_texts.push_back(value);
      if (!field.wrap_tag.empty()) b.open(field.wrap_tag, field.wrap_attrs);
      gold_ordinals[field.type].push_back(b.text(value));
      if (!field.wrap_tag.empty()) b.close();
    };

    if (tmpl.layout == "table") {
      b.open("table", {{"class", tmpl.container_class}});
      for (int rec = 0; rec < records; ++rec) {
        b.open("tr");
        for (const FieldSpec& field : tmpl.fields) {
          b.open("td");
          emit_field(field);
          b.close();
        }
        b.close();
      }
      b.close();
    } else if (tmpl.layout == "div") {
      b.open("div", {{"class", tmpl.container_class}});
      for (int rec = 0; rec < records; ++rec) {
        b.open("div", {{"class", tmpl.record_class}});
        for (const FieldSpec& field : tmpl.fields) {
          b.open("span", {{"class", "f-" + field.type}});
          emit_field(field);
          b.close();
        }
        b.close();
      }
      b.close();
    } else if (tmpl.layout == "ul") {
      b.open("ul", {{"class", tmpl.container_class}});
      for (int rec = 0; rec < records; ++rec) {
        b.open("li", {{"class", tmpl.record_class}});
        for (const FieldSpec& field : tmpl.fields) {
          b.open("span", {{"class", "f-" + field.type}});
          emit_field(field);
          b.close();
        }
        b.close();
      }
      b.close();
    } else {
      throw BadTemplate("unknown layout: " + tmpl.layout);
    }

    if (tmpl.duplicate_key_in_meta && !key_texts.empty()) {
      b.open("div", {{"class", "meta"}});
      b.text(key_texts.front());
      b.close();
    }
    if (tmpl.duplicate_key_in_comment > 0 && !key_texts.empty() &&
        rng.chance(tmpl.duplicate_key_in_comment)) {
      b.open("div", {{"class", "comments"}});
      b.text("Reader note: loved " + key_texts.front() + " since day one");
      b.close();
    }
    if (tmpl.footer) {
      b.open("div", {{"class", "footer"}});
      b.text("All content copyright " + tmpl.site_name);
      b.close();
    }
    b.close();  // body
    b.close();  // html

    std::string page_id = "page_" + std::to_string(p) + ".html";
    Document doc = parse_html(page_id, b.html());

    // match builder text ordinals to preorder text nodes
    std::vector<int> text_nodes = doc.text_nodes();
    if (static_cast<int>(text_nodes.size()) != b.text_count())
      throw InternalError("generated page lost text nodes in normalization");
    for (const auto& [type, ordinals] : gold_ordinals)
      for (int ord : ordinals)
        site.gold.nodes[type].insert({page_id, text_nodes[static_cast<size_t>(ord)]});
    for (int ord : trap_ordinals)
      site.trap_nodes.insert({page_id, text_nodes[static_cast<size_t>(ord)]});

    site.raw_pages.emplace_back(page_id, b.html());
    site.corpus.add(std::move(doc));
  }
  return site;
}

struct DomainOptions {
  std::string family = "mixed";  // mixed | table | div | ul
  std::vector<TypeName> types = {"name", "street", "zipcode", "phone"};
  TypeName key_type = "name";
  int pages_per_site = 10;
  std::pair<int, int> records_per_page = {3, 7};
  double ambiguous_fraction = 0.0;  // table sites with a delimiter-ambiguous key cell
  int trap_lines_per_page = 0;
  double optional_drop = 0.0;  // drop probability for non-key fields
};

// Distinct templates per site, same domain shape. Deterministic per seed.
inline std::vector<SiteData> generate_domain(int site_count, const DomainOptions& opt,
                                             uint64_t seed) {
  static const std::vector<std::string> container_classes = {"listing", "results", "dealers",
                                                             "stores", "items"};
  static const std::vector<std::string> record_classes = {"record", "entry", "row-item", "card"};
  static const std::vector<std::string> key_wraps = {"u", "b", "a", "em"};

  std::vector<SiteData> out;
  out.reserve(static_cast<size_t>(site_count));
  Rng domain_rng(seed);
  for (int i = 0; i < site_count; ++i) {
    Rng rng = domain_rng.fork(static_cast<uint64_t>(i) + 101);
    SiteTemplate t;
    t.schema.types = opt.types;
    t.schema.key_type = opt.key_type;
    t.site_name = "site" + std::to_string(i);
    t.seed = splitmix64(seed ^ (static_cast<uint64_t>(i) * 0x9e37u + 17));

    if (opt.family == "mixed") {
      static const std::vector<std::string> layouts = {"table", "div", "ul"};
      t.layout = layouts[rng.below(layouts.size())];
    } else {
      t.layout = opt.family;
    }
    bool ambiguous = t.layout == "table" && rng.chance(opt.ambiguous_fraction);
    t.lr_ambiguous = ambiguous;
    t.container_class =
        container_classes[rng.below(container_classes.size())] + "-" + std::to_string(i % 7);
    t.record_class = record_classes[rng.below(record_classes.size())];
    t.nav_links = static_cast<int>(rng.range(0, 4));
    t.footer = rng.chance(0.8);
    t.trap_lines_per_page = opt.trap_lines_per_page;

    std::string key_wrap = ambiguous ? "" : key_wraps[rng.below(key_wraps.size())];
    t.trap_wrap_tag = key_wrap;

    for (const TypeName& type : opt.types) {
      FieldSpec f;
      f.type = type;
      f.generator = type;
      if (type == opt.key_type) {
        f.wrap_tag = key_wrap;
        if (key_wrap == "a") f.wrap_attrs = {{"href", "#d" + std::to_string(i)}};
      } else if (type != opt.key_type && opt.optional_drop > 0) {
        f.drop_probability = opt.optional_drop;
      }
      t.fields.push_back(std::move(f));
    }
    if (ambiguous) {
      // key cell must sit between bare cells: street, name, phone, zipcode
      std::vector<FieldSpec> reordered;
      std::vector<TypeName> order = {"street", opt.key_type, "phone", "zipcode"};
      for (const TypeName& type : order)
        for (FieldSpec& f : t.fields)
          if (f.type == type) reordered.push_back(f);
      for (FieldSpec& f : t.fields) {
        bool present = false;
        for (const FieldSpec& r : reordered) present = present || r.type == f.type;
        if (!present) reordered.push_back(f);
      }
      std::vector<TypeName> new_order;
      for (const FieldSpec& f : reordered) new_order.push_back(f.type);
      t.fields = std::move(reordered);
      t.schema.types = std::move(new_order);
      t.schema.key_type = opt.key_type;
    }

    out.push_back(generate_site(t, opt.pages_per_site, opt.records_per_page));
    out.back().site_id = "site_" + std::to_string(i);
  }
  return out;
}

struct EntityDomainOptions {
  int pages_per_site = 8;
  double comment_duplicate_chance = 0.5;  // inconsistent duplicate location
  bool meta_duplicate = false;            // consistent duplicate location
};

// Single-entity sites: one title per page, its text duplicated in other
// page locations so that title annotators are naturally noisy.
inline std::vector<SiteData> generate_entity_domain(int site_count, const EntityDomainOptions& opt,
                                                    uint64_t seed) {
  std::vector<SiteData> out;
  Rng domain_rng(seed);
  for (int i = 0; i < site_count; ++i) {
    Rng rng = domain_rng.fork(static_cast<uint64_t>(i) + 301);
    SiteTemplate t;
    t.schema = RecordSchema::of({"title"});
    FieldSpec f;
    f.type = "title";
    f.generator = "title";
    f.wrap_tag = rng.chance(0.5) ? "b" : "";
    t.fields = {f};
    t.layout = rng.chance(0.5) ? "div" : "ul";
    t.container_class = "album-" + std::to_string(i % 5);
    t.record_class = "detail";
    t.nav_links = static_cast<int>(rng.range(1, 4));
    t.duplicate_key_in_meta = opt.meta_duplicate;
    t.duplicate_key_in_comment = opt.comment_duplicate_chance;
    t.site_name = "entity" + std::to_string(i);
    t.seed = splitmix64(seed ^ (static_cast<uint64_t>(i) * 0x51edu + 29));
    out.push_back(generate_site(t, opt.pages_per_site, {1, 1}));
    out.back().site_id = "entity_" + std::to_string(i);
  }
  return out;
}

}  // namespace ntw
