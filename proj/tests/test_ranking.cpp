#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ntw/enumerate.hpp"
#include "ntw/ranking.hpp"
#include "testutil.hpp"

using namespace ntw;
using Catch::Approx;
using ntwtest::all_text_nodes;
using ntwtest::cells_named;
using ntwtest::example_labels;
using ntwtest::example_table_corpus;
using ntwtest::find_text;

namespace {

FeatureModels toy_models() {
  // trained on perfect 4-attribute lists
  return FeatureModels::fit({4, 4, 4, 4, 3, 5, 4}, {0, 0, 0, 1, 0, 0, 2});
}

std::vector<Segment> page_segments(const std::string& html, const std::vector<std::string>& marked) {
  Corpus corpus;
  corpus.add(parse_html("p.html", html));
  NodeSet x;
  for (const auto& t : marked) x.insert(find_text(corpus, t));
  return segment(corpus, x);
}

}  // namespace

TEST_CASE("annotation likelihood matches hand computation") {
  Corpus corpus = example_table_corpus();
  NodeSet L = cells_named(corpus, {"n1", "n2", "n3", "n4", "n5"});
  AnnotatorModel m{"name", 0.9, 0.5};

  // X = L: 5 * log(0.5 / 0.1)
  CHECK(annotation_log_likelihood(L, L, m) == Approx(5 * std::log(5.0)));

  // one extra extracted node adds log((1-r)/p)
  NodeSet bigger = set_union(L, {find_text(corpus, "a1")});
  CHECK(annotation_log_likelihood(bigger, L, m) ==
        Approx(5 * std::log(5.0) + std::log(0.5 / 0.9)));
}

TEST_CASE("degenerate models are rejected") {
  Corpus corpus = example_table_corpus();
  NodeSet L = {find_text(corpus, "n1")};
  CHECK_THROWS_AS(annotation_log_likelihood(L, L, AnnotatorModel{"t", 1.0, 0.5}), DegenerateModel);
  CHECK_THROWS_AS(annotation_log_likelihood(L, L, AnnotatorModel{"t", 0.5, 0.0}), DegenerateModel);
}

TEST_CASE("likelihood is monotone in hits and anti-monotone in extras") {
  Corpus corpus = example_table_corpus();
  NodeSet L = cells_named(corpus, {"n1", "n2", "n3"});
  AnnotatorModel m{"name", 0.9, 0.6};  // 1-p < r
  NodeSet x1 = cells_named(corpus, {"n1"});
  NodeSet x2 = cells_named(corpus, {"n1", "n2"});
  CHECK(annotation_log_likelihood(x2, L, m) > annotation_log_likelihood(x1, L, m));
  NodeSet x3 = set_union(x2, cells_named(corpus, {"a1"}));
  CHECK(annotation_log_likelihood(x3, L, m) < annotation_log_likelihood(x2, L, m));
  // maximized at X = L when 1-p < r
  CHECK(annotation_log_likelihood(L, L, m) > annotation_log_likelihood(x2, L, m));
  CHECK(annotation_log_likelihood(L, L, m) >
        annotation_log_likelihood(all_text_nodes(corpus), L, m));
}

TEST_CASE("segments run from one extracted node to the next") {
  // a1 n1 z1 p1 a2 n2 z2 p2 a3 n3 z3 p3 in a flat list
  std::string html = "<div>";
  for (int i = 1; i <= 3; ++i)
    for (const char* f : {"a", "n", "z", "p"})
      html += "<span>" + std::string(f) + std::to_string(i) + "</span>";
  html += "</div>";
  std::vector<Segment> segs = page_segments(html, {"n1", "n2", "n3"});

  REQUIRE(segs.size() == 3);
  // each interior segment covers n_i z_i p_i a_{i+1}: 4 texts
  CHECK(segs[0].text_count == 4);
  CHECK(segs[1].text_count == 4);
  // the last runs to the end of the page: n3 z3 p3
  CHECK(segs[2].text_count == 3);
}

TEST_CASE("single extracted node yields one segment to page end") {
  std::vector<Segment> segs = page_segments("<div><b>x</b><b>y</b><b>z</b></div>", {"y"});
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].text_count == 2);  // y and z
}

TEST_CASE("token-count conservation across a page's segments") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    Corpus corpus = ntwtest::random_corpus(rng, 1);
    NodeSet texts = all_text_nodes(corpus);
    if (texts.empty()) continue;
    NodeSet x = ntwtest::random_subset(rng, texts, 5);
    std::vector<Segment> segs = segment(corpus, x);

    TokenStream ts = text_serialization(corpus.docs()[0]);
    size_t first_pos = ts.tokens.size();
    for (size_t i = 0; i < ts.tokens.size(); ++i)
      if (ts.nodes[i] >= 0 && x.count({corpus.docs()[0].page_id, ts.nodes[i]})) {
        first_pos = i;
        break;
      }
    size_t total = 0;
    for (const auto& s : segs) total += s.toks.size();
    CHECK(total == ts.tokens.size() - first_pos);
  }
}

TEST_CASE("schema size of identical 4-text segments is 4") {
  std::string html = "<div>";
  for (int i = 0; i < 3; ++i)
    html += "<div class='r'><b>k</b><span>v</span><span>w</span><em>q</em></div>";
  html += "</div>";
  Corpus corpus;
  corpus.add(parse_html("p.html", html));
  NodeSet x;
  for (const auto& n : corpus.docs()[0].nodes)
    if (n.is_text() && n.text == "k") x.insert({"p.html", n.preorder_index});
  REQUIRE(x.size() == 3);
  std::vector<Segment> segs = segment(corpus, x);
  CHECK(schema_size(segs) == 4);
  CHECK(alignment(segs) == 0);  // perfectly repeating list
}

TEST_CASE("whole-table extraction has schema size 1") {
  Corpus corpus = example_table_corpus();
  std::vector<Segment> segs = segment(corpus, all_text_nodes(corpus));
  CHECK(schema_size(segs) == 1);
}

TEST_CASE("no common token means schema size 0") {
  Segment a{{{"div", 0}, {"#text", 0}}, 1};
  Segment b{{{"span", 0}, {"b", 0}}, 0};
  CHECK(schema_size({a, b}) == 0);
}

TEST_CASE("alignment counts token edits") {
  Segment a{{{"li", 0}, {"#text", 0}, {"/li", 0}}, 1};
  Segment b{{{"li", 0}, {"#text", 0}, {"/li", 0}}, 1};
  CHECK(alignment({a, b}) == 0);
  Segment c{{{"li", 0}, {"b", 0}, {"#text", 0}, {"/li", 0}}, 1};
  CHECK(alignment({a, c}) == 1);
  CHECK(alignment({a}) == 0);
}

TEST_CASE("ragged two-column extraction aligns worse than the true column") {
  Corpus corpus = example_table_corpus();
  NodeSet first_col = cells_named(corpus, {"n1", "n2", "n3", "n4", "n5"});
  NodeSet two_cols = first_col;
  for (const char* t : {"a1", "a2", "a3", "a4", "a5"}) two_cols.insert(find_text(corpus, t));
  int align_one = alignment(segment(corpus, first_col));
  int align_two = alignment(segment(corpus, two_cols));
  CHECK(align_one == 0);
  CHECK(align_two > 0);  // gap pattern 0,2,0,2,...
}

TEST_CASE("kde is a probability mass function with a floor") {
  FeatureModel flat = FeatureModel::fit("schema_size", {4, 4, 4, 4});
  double total = 0;
  for (int v = flat.support_lo(); v <= flat.support_hi(); ++v) total += flat.mass(v);
  CHECK(total == Approx(1.0).epsilon(1e-9));
  CHECK(flat.mass(4) > flat.mass(6));
  // out-of-support values fall back to the floor mass
  CHECK(flat.mass(40) > 0);
  CHECK(flat.mass(40) <= FeatureModel::kFloor);
  // raw (pre-normalization) floor
  CHECK(flat.raw_mass().front() >= FeatureModel::kFloor);

  FeatureModel m = FeatureModel::fit("schema_size", {3, 4, 4, 5});
  CHECK(m.mass(4) >= m.mass(3));
  CHECK(m.mass(4) >= m.mass(5));

  CHECK_THROWS_AS(FeatureModel::fit("x", std::vector<int>{}), EmptySample);
}

TEST_CASE("unfitted models are rejected") {
  FeatureModels models;
  Segment a{{{"#text", 0}}, 1};
  CHECK_THROWS_AS(list_log_prior({a}, models), UnfittedModel);
  FeatureModel unfitted;
  CHECK_THROWS_AS(unfitted.log_mass(3), UnfittedModel);
}

TEST_CASE("scores depend only on the output node set") {
  Corpus corpus = example_table_corpus();
  NodeSet L = example_labels(corpus);
  NodeSet X = cells_named(corpus, {"n1", "n2", "n3", "n4", "n5"});
  AnnotatorModel m{"name", 0.9, 0.9};
  FeatureModels models = toy_models();
  double llh = annotation_log_likelihood(X, L, m);
  double prior = list_log_prior(segment(corpus, X), models);
  // recompute through a different path with the same output
  CHECK(annotation_log_likelihood(X, L, m) == Approx(llh));
  CHECK(list_log_prior(segment(corpus, X), models) == Approx(prior));
}

TEST_CASE("rank puts the first column on top of the worked-example space") {
  Corpus corpus = example_table_corpus();
  NodeSet L = example_labels(corpus);
  WrapperSpace space = top_down(inductor_for(InductorKind::table), corpus, L);
  AnnotatorModel m{"name", 0.9, 0.9};
  std::vector<RankedWrapper> ranked = rank(corpus, space, L, m, toy_models());
  REQUIRE(!ranked.empty());
  CHECK(ranked.front().output == cells_named(corpus, {"n1", "n2", "n3", "n4", "n5"}));
  for (const auto& rw : ranked) CHECK(std::isfinite(rw.log_score));
  // descending by score
  for (size_t i = 0; i + 1 < ranked.size(); ++i)
    CHECK(ranked[i].log_score >= ranked[i + 1].log_score);
}

TEST_CASE("noise-free labels covering the list rank the true wrapper first") {
  Corpus corpus = example_table_corpus();
  NodeSet truth = cells_named(corpus, {"n1", "n2", "n3", "n4", "n5"});
  WrapperSpace space = top_down(inductor_for(InductorKind::table), corpus, truth);
  AnnotatorModel m{"name", 0.95, 0.9};
  std::vector<RankedWrapper> ranked = rank(corpus, space, truth, m, toy_models());
  CHECK(ranked.front().output == truth);
}

TEST_CASE("likelihood-only and prior-only modes score accordingly") {
  Corpus corpus = example_table_corpus();
  NodeSet L = example_labels(corpus);
  WrapperSpace space = top_down(inductor_for(InductorKind::table), corpus, L);
  AnnotatorModel m{"name", 0.9, 0.9};
  FeatureModels models = toy_models();
  auto full = rank(corpus, space, L, m, models, ScoreMode::full);
  auto lonly = rank(corpus, space, L, m, models, ScoreMode::likelihood_only);
  auto ponly = rank(corpus, space, L, m, models, ScoreMode::prior_only);
  for (const auto& rw : lonly) CHECK(rw.log_score == Approx(rw.log_likelihood));
  for (const auto& rw : ponly) CHECK(rw.log_score == Approx(rw.log_prior));
  for (const auto& rw : full) CHECK(rw.log_score == Approx(rw.log_likelihood + rw.log_prior));
}
