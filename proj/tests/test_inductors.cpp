#include <catch2/catch_amalgamated.hpp>

#include "ntw/enumerate.hpp"
#include "ntw/inductors.hpp"
#include "testutil.hpp"

using namespace ntw;
using ntwtest::all_text_nodes;
using ntwtest::cells_named;
using ntwtest::example_labels;
using ntwtest::example_table_corpus;
using ntwtest::find_text;

namespace {

NodeSet induce_apply(const Inductor& ind, const Corpus& corpus, const NodeSet& labels) {
  return ind.apply(corpus, ind.induce(corpus, labels));
}

// test-local brute force: every text node whose feature set contains the rule
NodeSet brute_feature_scan(const Inductor& ind, const Corpus& corpus, const FeatureSet& rule) {
  NodeSet out;
  for (const auto& doc : corpus.docs())
    for (const auto& n : doc.nodes)
      if (n.is_text() && ind.features_of(corpus, {doc.page_id, n.preorder_index}).is_superset_of(rule))
        out.insert({doc.page_id, n.preorder_index});
  return out;
}

}  // namespace

TEST_CASE("table: single label returns just the label") {
  Corpus corpus = example_table_corpus();
  const Inductor& table = inductor_for(InductorKind::table);
  NodeSet labels = {find_text(corpus, "n1")};
  CHECK(induce_apply(table, corpus, labels) == labels);
}

TEST_CASE("table: same-row labels generalize to the row") {
  Corpus corpus = example_table_corpus();
  const Inductor& table = inductor_for(InductorKind::table);
  NodeSet labels = cells_named(corpus, {"n4", "a4"});
  Wrapper w = table.induce(corpus, labels);
  CHECK(w.describe() == "row 4");
  CHECK(table.apply(corpus, w) == cells_named(corpus, {"n4", "a4", "z4", "p4"}));
}

TEST_CASE("table: labels spanning rows and columns generalize to the whole table") {
  Corpus corpus = example_table_corpus();
  const Inductor& table = inductor_for(InductorKind::table);
  NodeSet labels = cells_named(corpus, {"a4", "z5"});
  Wrapper w = table.induce(corpus, labels);
  CHECK(w.describe() == "whole table");
  CHECK(table.apply(corpus, w).size() == 20);
}

TEST_CASE("table features are row/col coordinates") {
  Corpus corpus = example_table_corpus();
  const Inductor& table = inductor_for(InductorKind::table);
  FeatureSet fs = table.features_of(corpus, find_text(corpus, "n1"));
  CHECK(fs == FeatureSet({{"row", "1"}, {"col", "1"}}));
  FeatureSet a4 = table.features_of(corpus, find_text(corpus, "a4"));
  CHECK(a4 == FeatureSet({{"row", "4"}, {"col", "2"}}));
}

TEST_CASE("table feature intersection of a column is (col,1)") {
  Corpus corpus = example_table_corpus();
  const Inductor& table = inductor_for(InductorKind::table);
  Wrapper w = table.induce_from_features(corpus, cells_named(corpus, {"n1", "n2", "n4"}));
  CHECK(w.features == FeatureSet({{"col", "1"}}));
  CHECK(table.apply(corpus, w) == cells_named(corpus, {"n1", "n2", "n3", "n4", "n5"}));
}

TEST_CASE("table: empty feature intersection means whole table") {
  Corpus corpus = example_table_corpus();
  const Inductor& table = inductor_for(InductorKind::table);
  Wrapper w = table.induce_from_features(corpus, cells_named(corpus, {"n1", "a4"}));
  CHECK(w.features.empty());
  CHECK(apply_features(table, corpus, w.features).size() == 20);
}

TEST_CASE("xpath features carry position-indexed path properties") {
  Corpus corpus;
  corpus.add(parse_html("x.html",
                        "<div class='content'><table>"
                        "<tr><td>A1</td><td>B1</td></tr>"
                        "<tr><td>A2</td><td>B2</td></tr>"
                        "</table></div>"));
  const Inductor& xpath = inductor_for(InductorKind::xpath);
  FeatureSet fs = xpath.features_of(corpus, find_text(corpus, "A2"));
  CHECK(fs.contains({"1:tagname", "td"}));
  CHECK(fs.contains({"1:childnumber", "1"}));
  CHECK(fs.contains({"2:tagname", "tr"}));
  CHECK(fs.contains({"2:childnumber", "2"}));
  CHECK(fs.contains({"3:tagname", "table"}));
  CHECK(fs.contains({"4:tagname", "div"}));
  CHECK(fs.contains({"4:attr:class", "content"}));
}

TEST_CASE("xpath rule extracts the second column of the templated page") {
  Corpus corpus;
  corpus.add(parse_html("x.html",
                        "<div class='content'><table>"
                        "<tr><td>A1</td><td>B1</td></tr>"
                        "<tr><td>A2</td><td>B2</td></tr>"
                        "<tr><td>A3</td><td>B3</td></tr>"
                        "</table></div>"));
  // //div[@class='content']/table[1]/tr/td[2]/text() as path features
  Wrapper w;
  w.kind = InductorKind::xpath;
  w.features = FeatureSet({{"1:tagname", "td"},
                           {"1:childnumber", "2"},
                           {"2:tagname", "tr"},
                           {"3:tagname", "table"},
                           {"3:childnumber", "1"},
                           {"4:tagname", "div"},
                           {"4:attr:class", "content"}});
  const Inductor& xpath = inductor_for(InductorKind::xpath);
  CHECK(xpath.apply(corpus, w) == cells_named(corpus, {"B1", "B2", "B3"}));
}

TEST_CASE("xpath wrapper trained on a full column extracts exactly that column") {
  Corpus corpus = ntwtest::grid_corpus(3, 4, 3);
  const Inductor& xpath = inductor_for(InductorKind::xpath);
  NodeSet column;
  for (int p = 0; p < 3; ++p)
    for (int r = 1; r <= 4; ++r)
      column.insert(find_text(corpus, "p" + std::to_string(p) + "r" + std::to_string(r) + "c2"));
  Wrapper w = xpath.induce(corpus, column);
  CHECK(xpath.apply(corpus, w) == column);
  CHECK(brute_feature_scan(xpath, corpus, w.features) == column);
}

TEST_CASE("lr delimiter pair <td> </td> fetches all cells") {
  Corpus corpus = ntwtest::grid_corpus(2, 3, 3);
  Wrapper w;
  w.kind = InductorKind::lr;
  w.lr = {"<td>", "</td>"};
  const Inductor& lr = inductor_for(InductorKind::lr);
  CHECK(lr.apply(corpus, w) == all_text_nodes(corpus));
}

TEST_CASE("lr induce finds maximal common delimiters") {
  Rng rng(17);
  const Inductor& lr = inductor_for(InductorKind::lr);
  for (int trial = 0; trial < 15; ++trial) {
    Corpus corpus = ntwtest::random_corpus(rng, 2);
    NodeSet texts = all_text_nodes(corpus);
    if (texts.size() < 2) continue;
    NodeSet labels = ntwtest::random_subset(rng, texts, 3);
    Wrapper w = lr.induce(corpus, labels);
    CHECK(!w.lr.left.empty());   // preceding markup always ends with '>'
    CHECK(!w.lr.right.empty());  // following markup always starts with '<'
    CHECK(w.lr.left.back() == '>');
    CHECK(w.lr.right.front() == '<');
    // delimiters bound every label's span and are maximal
    for (const auto& ref : labels) {
      CharStream cs = char_stream(corpus.doc(ref.page_id));
      const auto* span = cs.span_of(ref.preorder_index);
      REQUIRE(span != nullptr);
      std::string prec = cs.chars.substr(0, span->begin);
      std::string foll = cs.chars.substr(span->end);
      CHECK(prec.ends_with(w.lr.left));
      CHECK(foll.starts_with(w.lr.right));
    }
    if (labels.size() >= 2) {
      bool left_extendable = true, right_extendable = true;
      std::string longer_left, longer_right;
      bool first = true;
      for (const auto& ref : labels) {
        CharStream cs = char_stream(corpus.doc(ref.page_id));
        const auto* span = cs.span_of(ref.preorder_index);
        std::string prec = cs.chars.substr(0, span->begin);
        std::string foll = cs.chars.substr(span->end);
        std::string l = prec.size() > w.lr.left.size()
                            ? prec.substr(prec.size() - w.lr.left.size() - 1)
                            : std::string();
        std::string r = foll.size() > w.lr.right.size() ? foll.substr(0, w.lr.right.size() + 1)
                                                        : std::string();
        if (first) {
          longer_left = l;
          longer_right = r;
          first = false;
        } else {
          left_extendable = left_extendable && !l.empty() && l == longer_left;
          right_extendable = right_extendable && !r.empty() && r == longer_right;
        }
        left_extendable = left_extendable && !l.empty();
        right_extendable = right_extendable && !r.empty();
      }
      CHECK_FALSE(left_extendable);
      CHECK_FALSE(right_extendable);
    }
  }
}

TEST_CASE("lr matches must coincide with exactly one text span") {
  Corpus corpus;
  corpus.add(parse_html("s.html", "<div><u>one</u><u>two words</u><b>three</b></div>"));
  Wrapper w;
  w.kind = InductorKind::lr;
  w.lr = {"<u>", "</u>"};
  const Inductor& lr = inductor_for(InductorKind::lr);
  CHECK(lr.apply(corpus, w) == cells_named(corpus, {"one", "two words"}));
}

TEST_CASE("inductor errors") {
  Corpus corpus = example_table_corpus();
  for (InductorKind kind : {InductorKind::table, InductorKind::lr, InductorKind::xpath}) {
    const Inductor& ind = inductor_for(kind);
    CHECK_THROWS_AS(ind.induce(corpus, NodeSet{}), EmptyLabelSet);
    CHECK_THROWS_AS(ind.induce(corpus, NodeSet{{"table.html", 0}}), NotTextNode);
  }
  CHECK_THROWS_AS(inductor_for(InductorKind::lr).features_of(corpus, find_text(corpus, "n1")),
                  NotFeatureBased);
}

TEST_CASE("well-behavedness: fidelity, closure, monotonicity") {
  Rng rng(23);
  for (InductorKind kind : {InductorKind::table, InductorKind::lr, InductorKind::xpath}) {
    const Inductor& ind = inductor_for(kind);
    for (int trial = 0; trial < 30; ++trial) {
      Corpus corpus = kind == InductorKind::table
                          ? ntwtest::grid_corpus(1 + static_cast<int>(rng.below(2)),
                                                 2 + static_cast<int>(rng.below(3)),
                                                 2 + static_cast<int>(rng.below(3)))
                          : ntwtest::random_corpus(rng, 1 + static_cast<int>(rng.below(2)));
      NodeSet texts = all_text_nodes(corpus);
      if (texts.size() < 2) continue;
      NodeSet s1 = ntwtest::random_subset(rng, texts, 4);
      NodeSet x1 = induce_apply(ind, corpus, s1);

      // fidelity
      CHECK(is_subset(s1, x1));

      // closure: adding an extracted node changes nothing
      if (!x1.empty()) {
        std::vector<NodeRef> pool(x1.begin(), x1.end());
        NodeRef extra = pool[rng.below(pool.size())];
        NodeSet s1x = s1;
        s1x.insert(extra);
        CHECK(induce_apply(ind, corpus, s1x) == x1);
      }

      // monotonicity
      NodeSet s2 = set_union(s1, ntwtest::random_subset(rng, texts, 3));
      CHECK(is_subset(x1, induce_apply(ind, corpus, s2)));
    }
  }
}

TEST_CASE("feature route and native route are extensionally equal") {
  Rng rng(29);
  for (InductorKind kind : {InductorKind::table, InductorKind::xpath}) {
    const Inductor& ind = inductor_for(kind);
    for (int trial = 0; trial < 30; ++trial) {
      Corpus corpus = kind == InductorKind::table ? ntwtest::grid_corpus(2, 3, 4)
                                                  : ntwtest::random_corpus(rng, 2);
      NodeSet texts = all_text_nodes(corpus);
      if (texts.empty()) continue;
      NodeSet labels = ntwtest::random_subset(rng, texts, 5);
      NodeSet native = induce_apply(ind, corpus, labels);
      Wrapper fw = ind.induce_from_features(corpus, labels);
      CHECK(native == apply_features(ind, corpus, fw.features));
    }
  }
}

TEST_CASE("singleton label wrapper extracts nodes with identical features") {
  Corpus corpus = ntwtest::grid_corpus(1, 3, 3);
  const Inductor& xpath = inductor_for(InductorKind::xpath);
  NodeRef ref = find_text(corpus, "p0r2c2");
  NodeSet out = induce_apply(xpath, corpus, {ref});
  CHECK(out.count(ref) == 1);  // fidelity for singletons
}
