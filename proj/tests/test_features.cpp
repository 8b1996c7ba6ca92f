#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <vector>

#include "community.hpp"
#include "corpus.hpp"
#include "error.hpp"
#include "features.hpp"
#include "graph.hpp"
#include "helpers.hpp"

using namespace citequal;
using testutil::PaperSpec;
using testutil::make_corpus;

namespace {

CitationGraph graph_of(const std::vector<PaperSpec>& specs) {
  return CitationGraph::build(make_corpus(specs));
}

}  // namespace

TEST_CASE("diversity of an uncited paper is one") {
  CitationGraph g = graph_of({{"p", 2000, "V", {}}});
  FeatureConfig cfg;
  CHECK(diversity(g, "p", 2005, cfg) == 1.0);
  CHECK(diversity(g, "p", 2000, cfg) == 1.0);
}

TEST_CASE("diversity separates two citer cliques") {
  // Two groups of three mutually citing citers; the neighborhood is two
  // 4-cliques sharing p.
  CitationGraph g = graph_of({
      {"p", 2000, "V", {}},
      {"a1", 2001, "V", {"p"}},
      {"a2", 2002, "V", {"p", "a1"}},
      {"a3", 2003, "V", {"p", "a1", "a2"}},
      {"b1", 2001, "V", {"p"}},
      {"b2", 2002, "V", {"p", "b1"}},
      {"b3", 2003, "V", {"p", "b1", "b2"}},
  });
  FeatureConfig cfg;
  CHECK(diversity(g, "p", 2010, cfg) == 2.0);

  // cross-check the greedy result against the exact optimum on the same view
  CitationGraph sub = g.khop_in_subgraph("p", cfg.max_depth, 2010);
  Partition exact = brute_force_max_modularity(sub);
  Partition greedy = fast_greedy_communities(sub);
  CHECK(exact.community_count == 2);
  CHECK(exact.modularity == doctest::Approx(0.21875).epsilon(1e-12));
  CHECK(greedy.modularity == doctest::Approx(exact.modularity).epsilon(1e-9));
}

TEST_CASE("diversity grows as new citer clusters arrive") {
  CitationGraph g = graph_of({
      {"p", 2000, "V", {}},
      {"a1", 2001, "V", {"p"}},
      {"a2", 2002, "V", {"p", "a1"}},
      {"b1", 2005, "V", {"p"}},
      {"b2", 2006, "V", {"p", "b1"}},
  });
  FeatureConfig cfg;
  double early = diversity(g, "p", 2002, cfg);
  double late = diversity(g, "p", 2006, cfg);
  CHECK(early == 1.0);
  CHECK(late == 2.0);
  CHECK(early <= late);
}

TEST_CASE("diversity respects max_depth") {
  // chain c2 -> c1 -> p: depth 1 sees only c1, depth 2 sees both
  CitationGraph g = graph_of({
      {"p", 2000, "V", {}},
      {"c1", 2001, "V", {"p"}},
      {"c2", 2002, "V", {"c1"}},
  });
  FeatureConfig cfg;
  cfg.max_depth = 1;
  CHECK(g.khop_in_subgraph("p", 1, 2010).node_count() == 2);
  cfg.max_depth = 2;
  CHECK(g.khop_in_subgraph("p", 2, 2010).node_count() == 3);
  CHECK(diversity(g, "p", 2010, cfg) == 1.0);  // a chain clusters together
}

TEST_CASE("diversity rejects cutoffs before publication") {
  CitationGraph g = graph_of({{"p", 2000, "V", {}}});
  FeatureConfig cfg;
  CHECK_THROWS_WITH_AS(diversity(g, "p", 1999, cfg), doctest::Contains("precedes publication"),
                       Error);
}

TEST_CASE("timeliness of an uncited paper is pure age penalty") {
  CitationGraph g = graph_of({{"p", 2000, "V", {}}});
  FeatureConfig cfg;  // punish = 1
  CHECK(timeliness(g, "p", 2005, cfg) == doctest::Approx(-5.0).epsilon(1e-12));
}

TEST_CASE("timeliness telescopes the gain gradient") {
  // yearly gains 2,3,5,4,6 over offsets 0..4
  std::vector<PaperSpec> specs = {{"p", 2000, "V", {}}};
  auto add_citers = [&specs](int year, int count) {
    for (int i = 0; i < count; ++i)
      specs.push_back({"c" + std::to_string(year) + "_" + std::to_string(i), year, "W", {"p"}});
  };
  add_citers(2000, 2);
  add_citers(2001, 3);
  add_citers(2002, 5);
  add_citers(2003, 4);
  add_citers(2004, 6);
  CitationGraph g = graph_of(specs);

  GainTrajectory traj = gain_trajectory(g, "p", 2004);
  REQUIRE(traj.gains == std::vector<std::int64_t>{2, 3, 5, 4, 6});

  FeatureConfig cfg;  // punish = 1, gap = 4: (6 - 0) / 4 - 4 = -2.5
  CHECK(timeliness(g, "p", 2004, cfg) == doctest::Approx(-2.5).epsilon(1e-12));
}

TEST_CASE("timeliness with a late burst and no penalty") {
  std::vector<PaperSpec> specs = {{"p", 2000, "V", {}}};
  for (int i = 0; i < 10; ++i)
    specs.push_back({"c" + std::to_string(i), 2002, "W", {"p"}});
  CitationGraph g = graph_of(specs);
  FeatureConfig cfg;
  cfg.punish = 0.0;  // gains 0,0,10 over gap 2: 10 / 2 = 5
  CHECK(timeliness(g, "p", 2002, cfg) == doctest::Approx(5.0).epsilon(1e-12));
  cfg.punish = 0.5;
  CHECK(timeliness(g, "p", 2002, cfg) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("timeliness at publication year is degenerate") {
  CitationGraph g = graph_of({{"p", 2000, "V", {}}, {"c", 2000, "W", {"p"}}});
  FeatureConfig cfg;
  std::uint32_t flags = 0;
  CHECK(timeliness(g, "p", 2000, cfg, &flags) == 0.0);
  CHECK((flags & kFlagDegenerateGap) != 0);
  CHECK(timeliness(g, "p", 2000, cfg) == 0.0);  // null flag pointer is fine
}

TEST_CASE("venue impact factor counts span papers and their fresh citations") {
  CitationGraph g = graph_of({
      {"v1", 2008, "V", {}},
      {"v2", 2009, "V", {}},
      {"v0", 2007, "V", {}},  // outside the span for year 2010
      {"x1", 2010, "W", {"v1", "v0"}},
      {"x2", 2010, "W", {"v1"}},
      {"x3", 2010, "W", {"v1", "v2"}},
      {"x4", 2010, "W", {"v1", "v2"}},
      {"x5", 2009, "W", {"v1"}},  // citation in 2009, not in the target year
  });
  VenueImpact vif = venue_impact_factor(g, "V", 2010, 2);
  CHECK_FALSE(vif.unknown);
  // span [2008, 2009] holds v1, v2; 2010 citations: v1 gets 4, v2 gets 2
  CHECK(vif.value == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("venue impact factor is invariant under venue doubling") {
  auto build = [](int copies) {
    std::vector<PaperSpec> specs;
    for (int k = 0; k < copies; ++k) {
      std::string s = std::to_string(k);
      specs.push_back({"v1_" + s, 2008, "V", {}});
      specs.push_back({"v2_" + s, 2009, "V", {}});
      specs.push_back({"x1_" + s, 2010, "W", {"v1_" + s}});
      specs.push_back({"x2_" + s, 2010, "W", {"v1_" + s, "v2_" + s}});
    }
    return CitationGraph::build(make_corpus(specs));
  };
  VenueImpact one = venue_impact_factor(build(1), "V", 2010, 2);
  VenueImpact two = venue_impact_factor(build(2), "V", 2010, 2);
  CHECK(one.value == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(two.value == doctest::Approx(one.value).epsilon(1e-12));
}

TEST_CASE("venue impact factor degenerates to unknown") {
  CitationGraph g = graph_of({{"v1", 2010, "V", {}}});
  VenueImpact missing = venue_impact_factor(g, "NoSuchVenue", 2010, 2);
  CHECK(missing.unknown);
  CHECK(missing.value == 0.0);
  // venue exists but has no papers inside [2008, 2009]
  VenueImpact empty_span = venue_impact_factor(g, "V", 2010, 2);
  CHECK(empty_span.unknown);
  CHECK(empty_span.value == 0.0);
  CHECK_THROWS_AS(venue_impact_factor(g, "V", 2010, 0), Error);
}

TEST_CASE("saliency subtracts the venue bar from recent citations") {
  // p sits in venue W whose 2010 impact factor is 3.5 (2 papers, 7 citations)
  std::vector<PaperSpec> specs = {
      {"p", 2000, "W", {}},
      {"w1", 2008, "W", {}},
      {"w2", 2009, "W", {}},
  };
  for (int i = 0; i < 4; ++i)
    specs.push_back({"fw1_" + std::to_string(i), 2010, "Z", {"w1"}});
  for (int i = 0; i < 3; ++i)
    specs.push_back({"fw2_" + std::to_string(i), 2010, "Z", {"w2"}});
  for (int i = 0; i < 5; ++i)
    specs.push_back({"r9_" + std::to_string(i), 2009, "Z", {"p"}});
  for (int i = 0; i < 7; ++i)
    specs.push_back({"r10_" + std::to_string(i), 2010, "Z", {"p"}});
  specs.push_back({"old", 2005, "Z", {"p"}});  // outside the recency window
  CitationGraph g = graph_of(specs);

  FeatureConfig cfg;  // saliency_window = 2, if_span = 2
  std::uint32_t flags = 0;
  CHECK(saliency(g, "p", 2010, cfg, &flags) == doctest::Approx(8.5).epsilon(1e-12));
  CHECK(flags == 0);
}

TEST_CASE("saliency can go negative against a strong venue") {
  std::vector<PaperSpec> specs = {{"p", 2000, "W", {}}};
  for (int i = 0; i < 4; ++i) specs.push_back({"w" + std::to_string(i), 2009, "W", {}});
  for (int i = 0; i < 29; ++i) {
    std::string id = "f" + std::to_string(i);
    specs.push_back({id, 2010, "Z", {"w" + std::to_string(i % 4)}});
  }
  for (int i = 0; i < 5; ++i) specs.push_back({"r" + std::to_string(i), 2010, "Z", {"p"}});
  CitationGraph g = graph_of(specs);
  FeatureConfig cfg;  // 5 recent - 29/4 = -2.25
  CHECK(saliency(g, "p", 2010, cfg) == doctest::Approx(-2.25).epsilon(1e-12));
}

TEST_CASE("saliency of an uncited paper in an unknown venue") {
  CitationGraph g = graph_of({{"p", 2000, "", {}}});
  FeatureConfig cfg;
  std::uint32_t flags = 0;
  CHECK(saliency(g, "p", 2010, cfg, &flags) == 0.0);
  CHECK((flags & kFlagUnknownVenue) != 0);
}

TEST_CASE("extract_one bundles the three features and their flags") {
  CitationGraph g = graph_of({{"p", 2000, "", {}}});
  FeatureConfig cfg;
  FeatureVector v = extract_one(g, "p", 2000, cfg);
  CHECK(v.paper_id == "p");
  CHECK(v.as_of_year == 2000);
  CHECK(v.diversity == 1.0);
  CHECK(v.timeliness == 0.0);
  CHECK(v.saliency == 0.0);
  CHECK((v.flags & kFlagDegenerateGap) != 0);
  CHECK((v.flags & kFlagUnknownVenue) != 0);
}

TEST_CASE("batch extraction matches per-paper calls on a synthetic corpus") {
  SyntheticParams params;
  params.n_papers = 50;
  params.year_min = 1990;
  params.year_max = 2010;
  params.seed = 42;
  Corpus corpus = generate_synthetic(params).corpus;
  CitationGraph g = CitationGraph::build(corpus);

  std::vector<std::string> ids;
  for (const PaperRecord& p : corpus.papers)
    if (p.year <= 2005) ids.push_back(p.id);
  REQUIRE(ids.size() > 10);

  FeatureConfig cfg;
  std::vector<FeatureVector> batch = extract_features(g, ids, 2005, cfg);
  REQUIRE(batch.size() == ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    CHECK(batch[i].paper_id == ids[i]);
    FeatureVector single = extract_one(g, ids[i], 2005, cfg);
    CHECK(batch[i].diversity == single.diversity);
    CHECK(batch[i].timeliness == single.timeliness);
    CHECK(batch[i].saliency == single.saliency);
    CHECK(batch[i].flags == single.flags);
    // independent recomputation through the scalar entry points
    std::uint32_t flags = 0;
    CHECK(batch[i].timeliness == timeliness(g, ids[i], 2005, cfg, &flags));
    CHECK(batch[i].saliency == saliency(g, ids[i], 2005, cfg, &flags));
    CHECK(batch[i].flags == flags);
  }
}

TEST_CASE("batch extraction is order equivariant and thread count invariant") {
  SyntheticParams params;
  params.n_papers = 60;
  params.year_min = 1995;
  params.year_max = 2012;
  params.seed = 7;
  Corpus corpus = generate_synthetic(params).corpus;
  CitationGraph g = CitationGraph::build(corpus);

  std::vector<std::string> ids;
  for (const PaperRecord& p : corpus.papers)
    if (p.year <= 2008) ids.push_back(p.id);

  FeatureConfig cfg;
  std::vector<FeatureVector> serial = extract_features(g, ids, 2008, cfg, 1);
  std::vector<FeatureVector> threaded = extract_features(g, ids, 2008, cfg, 4);
  REQUIRE(serial.size() == threaded.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].paper_id == threaded[i].paper_id);
    CHECK(serial[i].diversity == threaded[i].diversity);  // bit-identical
    CHECK(serial[i].timeliness == threaded[i].timeliness);
    CHECK(serial[i].saliency == threaded[i].saliency);
    CHECK(serial[i].flags == threaded[i].flags);
  }

  std::vector<std::string> reversed(ids.rbegin(), ids.rend());
  std::vector<FeatureVector> rev = extract_features(g, reversed, 2008, cfg, 1);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const FeatureVector& a = serial[i];
    const FeatureVector& b = rev[ids.size() - 1 - i];
    CHECK(a.paper_id == b.paper_id);
    CHECK(a.diversity == b.diversity);
    CHECK(a.timeliness == b.timeliness);
    CHECK(a.saliency == b.saliency);
  }
}

TEST_CASE("extraction error contracts") {
  CitationGraph g = graph_of({{"p", 2000, "V", {}}});
  FeatureConfig cfg;
  CHECK_THROWS_WITH_AS(extract_features(g, {"p", "ghost"}, 2005, cfg),
                       doctest::Contains("ghost"), Error);
  CHECK_THROWS_AS(extract_features(g, {"p"}, 2005, cfg, 0), Error);
  FeatureConfig bad;
  bad.max_depth = -1;
  CHECK_THROWS_AS(extract_features(g, {"p"}, 2005, bad), Error);
  bad = FeatureConfig{};
  bad.punish = -0.5;
  CHECK_THROWS_AS(timeliness(g, "p", 2005, bad), Error);
  bad = FeatureConfig{};
  bad.saliency_window = 0;
  CHECK_THROWS_AS(saliency(g, "p", 2005, bad), Error);
}

TEST_CASE("features CSV carries flag names") {
  FeatureVector a;
  a.paper_id = "p,1";
  a.as_of_year = 2010;
  a.diversity = 2;
  a.timeliness = -2.5;
  a.saliency = 8.5;
  FeatureVector b;
  b.paper_id = "q";
  b.as_of_year = 2010;
  b.flags = kFlagDegenerateGap | kFlagUnknownVenue;
  std::ostringstream out;
  write_features_csv({a, b}, out);
  CHECK(out.str() ==
        "paper_id,as_of_year,diversity,timeliness,saliency,flags\n"
        "\"p,1\",2010,2,-2.5,8.5,\n"
        "q,2010,0,0,0,degenerate_gap;unknown_venue\n");
  CHECK(flag_names(0) == "");
  CHECK(flag_names(kFlagUnknownVenue) == "unknown_venue");
}
