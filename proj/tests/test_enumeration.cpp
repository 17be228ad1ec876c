#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "ntw/enumerate.hpp"
#include "testutil.hpp"

using namespace ntw;
using ntwtest::all_text_nodes;
using ntwtest::cells_named;
using ntwtest::example_labels;
using ntwtest::example_table_corpus;
using ntwtest::find_text;

namespace {

// The eight outputs of the worked example: five cells, column 1, row 4, table.
std::set<NodeSet> expected_example_outputs(const Corpus& corpus) {
  std::set<NodeSet> out;
  for (const char* t : {"n1", "n2", "n4", "a4", "z5"}) out.insert({find_text(corpus, t)});
  out.insert(cells_named(corpus, {"n1", "n2", "n3", "n4", "n5"}));
  out.insert(cells_named(corpus, {"n4", "a4", "z4", "p4"}));
  out.insert(all_text_nodes(corpus));
  return out;
}

}  // namespace

TEST_CASE("closure of two column cells pulls in the third (worked example)") {
  Corpus corpus = example_table_corpus();
  NodeSet labels = example_labels(corpus);
  const Inductor& table = inductor_for(InductorKind::table);
  NodeSet s = cells_named(corpus, {"n1", "n2"});
  CHECK(closure(table, corpus, s, labels) == cells_named(corpus, {"n1", "n2", "n4"}));
}

TEST_CASE("closure is idempotent and fixes L") {
  Corpus corpus = example_table_corpus();
  NodeSet labels = example_labels(corpus);
  const Inductor& table = inductor_for(InductorKind::table);
  CHECK(closure(table, corpus, labels, labels) == labels);

  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    NodeSet s = ntwtest::random_subset(rng, labels, labels.size());
    NodeSet once = closure(table, corpus, s, labels);
    CHECK(closure(table, corpus, once, labels) == once);
  }
}

TEST_CASE("bottom-up enumerates the eight wrappers of the worked example") {
  Corpus corpus = example_table_corpus();
  NodeSet labels = example_labels(corpus);
  WrapperSpace space = bottom_up(inductor_for(InductorKind::table), corpus, labels);
  CHECK(space.k() == 8);
  CHECK(space.outputs() == expected_example_outputs(corpus));
  CHECK(space.inductor_calls <= 8 * 5);

  // once expanded, a set is never expanded again
  std::set<NodeSet> seen;
  for (const auto& s : space.expansion_trace) CHECK(seen.insert(s).second);
}

TEST_CASE("top-down makes exactly eight calls on the worked example") {
  Corpus corpus = example_table_corpus();
  NodeSet labels = example_labels(corpus);
  WrapperSpace space = top_down(inductor_for(InductorKind::table), corpus, labels);
  CHECK(space.k() == 8);
  CHECK(space.inductor_calls == 8);
  CHECK(space.outputs() == expected_example_outputs(corpus));

  // the family is exactly the paper's Z
  std::set<NodeSet> family;
  for (const auto& e : space.entries) family.insert(e.provenance);
  std::set<NodeSet> expected = {
      {find_text(corpus, "n1")},
      {find_text(corpus, "n2")},
      {find_text(corpus, "n4")},
      {find_text(corpus, "a4")},
      {find_text(corpus, "z5")},
      cells_named(corpus, {"n4", "a4"}),
      cells_named(corpus, {"n1", "n2", "n4"}),
      labels,
  };
  CHECK(family == expected);
}

TEST_CASE("naive enumeration: 31 calls, 8 unique wrappers") {
  Corpus corpus = example_table_corpus();
  NodeSet labels = example_labels(corpus);
  WrapperSpace space = naive_enumerate(inductor_for(InductorKind::table), corpus, labels);
  CHECK(space.inductor_calls == 31);
  CHECK(space.k() == 8);
  CHECK(space.outputs() == expected_example_outputs(corpus));
}

TEST_CASE("naive enumeration rejects oversized label sets") {
  Corpus corpus = ntwtest::grid_corpus(1, 4, 4);
  NodeSet labels = all_text_nodes(corpus);
  REQUIRE(labels.size() == 16);
  CHECK_THROWS_AS(naive_enumerate(inductor_for(InductorKind::table), corpus, labels),
                  TooManyLabels);
}

TEST_CASE("two labels with distinct rows and columns yield three wrappers") {
  Corpus corpus = ntwtest::grid_corpus(1, 3, 3);
  NodeSet labels = cells_named(corpus, {"p0r1c1", "p0r2c2"});
  WrapperSpace space = naive_enumerate(inductor_for(InductorKind::table), corpus, labels);
  CHECK(space.k() == 3);  // each cell alone plus the whole table
}

TEST_CASE("single label: every enumerator makes one call") {
  Corpus corpus = example_table_corpus();
  NodeSet labels = {find_text(corpus, "n1")};
  for (Enumerator e : {Enumerator::bottomup, Enumerator::topdown, Enumerator::naive}) {
    WrapperSpace space = enumerate_wrappers(e, inductor_for(InductorKind::table), corpus, labels);
    CHECK(space.inductor_calls == 1);
    CHECK(space.k() == 1);
  }
}

TEST_CASE("table subdivisions of the worked example") {
  Corpus corpus = example_table_corpus();
  NodeSet labels = example_labels(corpus);
  const Inductor& table = inductor_for(InductorKind::table);

  std::vector<NodeSet> by_col = subdivision(table, corpus, labels, "col");
  std::set<NodeSet> col_set(by_col.begin(), by_col.end());
  std::set<NodeSet> expected_cols = {cells_named(corpus, {"n1", "n2", "n4"}),
                                     {find_text(corpus, "a4")},
                                     {find_text(corpus, "z5")}};
  CHECK(col_set == expected_cols);

  std::vector<NodeSet> by_row = subdivision(table, corpus, labels, "row");
  std::set<NodeSet> row_set(by_row.begin(), by_row.end());
  CHECK(row_set.count(cells_named(corpus, {"n4", "a4"})) == 1);

  CHECK(subdivision(table, corpus, labels, "nosuchattr").empty());
}

TEST_CASE("full n x n labels produce n^2 + 2n + 1 wrappers") {
  for (int n : {2, 3}) {
    Corpus corpus = ntwtest::grid_corpus(1, n, n);
    NodeSet labels = all_text_nodes(corpus);
    WrapperSpace td = top_down(inductor_for(InductorKind::table), corpus, labels);
    WrapperSpace bu = bottom_up(inductor_for(InductorKind::table), corpus, labels);
    CHECK(td.k() == n * n + 2 * n + 1);
    CHECK(bu.k() == n * n + 2 * n + 1);
    CHECK(td.outputs() == bu.outputs());
  }
}

TEST_CASE("enumerators agree and respect call bounds on random instances") {
  Rng rng(37);
  for (InductorKind kind : {InductorKind::table, InductorKind::lr, InductorKind::xpath}) {
    const Inductor& ind = inductor_for(kind);
    for (int trial = 0; trial < 12; ++trial) {
      Corpus corpus = kind == InductorKind::table
                          ? ntwtest::grid_corpus(1 + static_cast<int>(rng.below(2)),
                                                 2 + static_cast<int>(rng.below(3)),
                                                 2 + static_cast<int>(rng.below(3)))
                          : ntwtest::random_corpus(rng, 1 + static_cast<int>(rng.below(2)));
      NodeSet texts = all_text_nodes(corpus);
      if (texts.size() < 2) continue;
      NodeSet labels = ntwtest::random_subset(rng, texts, 6);

      WrapperSpace naive = naive_enumerate(ind, corpus, labels);
      WrapperSpace bu = bottom_up(ind, corpus, labels);
      WrapperSpace td = top_down(ind, corpus, labels);

      CHECK(bu.outputs() == naive.outputs());
      CHECK(td.outputs() == naive.outputs());
      CHECK(td.inductor_calls == naive.k());
      CHECK(bu.inductor_calls <= static_cast<long long>(naive.k()) * static_cast<long long>(labels.size()));

      // number of closed subsets equals k
      std::vector<NodeRef> ordered(labels.begin(), labels.end());
      std::set<NodeSet> closed;
      for (uint32_t mask = 1; mask < (1u << ordered.size()); ++mask) {
        NodeSet s;
        for (size_t i = 0; i < ordered.size(); ++i)
          if (mask & (1u << i)) s.insert(ordered[i]);
        NodeSet c = closure(ind, corpus, s, labels);
        if (c == s) closed.insert(s);
      }
      CHECK(static_cast<int>(closed.size()) == naive.k());
    }
  }
}
