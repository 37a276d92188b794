#include "radarq/protocols.h"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <random>

#include "support/oracles.h"

namespace radarq {
namespace {

using ::testing::HasSubstr;

NetworkGraph path_graph(int n, int memory = 4) {
  std::vector<NodeSpec> nodes;
  std::vector<LinkSpec> links;
  for (int i = 0; i < n; ++i) nodes.push_back({static_cast<NodeId>(i), memory});
  for (int i = 0; i + 1 < n; ++i) {
    links.push_back({static_cast<NodeId>(i), static_cast<NodeId>(i + 1)});
  }
  return NetworkGraph(std::move(nodes), std::move(links));
}

// Hub 0 with `leaves` spokes.
NetworkGraph star(int leaves, int memory = 4) {
  std::vector<NodeSpec> nodes{{0, memory}};
  std::vector<LinkSpec> links;
  for (int i = 1; i <= leaves; ++i) {
    nodes.push_back({static_cast<NodeId>(i), memory});
    links.push_back({0, static_cast<NodeId>(i)});
  }
  return NetworkGraph(std::move(nodes), std::move(links));
}

Request req(RequestId id, NodeId s, NodeId d) {
  Request r;
  r.id = id;
  r.source = s;
  r.destination = d;
  return r;
}

TEST(StrategyNameTest, RoundTrips) {
  for (const std::string& name : strategy_names()) {
    EXPECT_EQ(strategy_name(parse_strategy(name)), name);
  }
  EXPECT_EQ(parse_strategy("radar-q"), StrategyKind::kRadarQ);
  EXPECT_EQ(parse_strategy("synch-nca"), StrategyKind::kSynchNca);
  EXPECT_EQ(parse_strategy("asynch-root"), StrategyKind::kAsynchRoot);
}

TEST(StrategyNameTest, UnknownNameListsValidOnes) {
  try {
    parse_strategy("dijkstra");
    FAIL() << "expected an exception";
  } catch (const std::invalid_argument& e) {
    EXPECT_THAT(e.what(), HasSubstr("dijkstra"));
    EXPECT_THAT(e.what(), HasSubstr("radar-q"));
    EXPECT_THAT(e.what(), HasSubstr("synch-nca"));
    EXPECT_THAT(e.what(), HasSubstr("asynch-root"));
  }
}

TEST(LinkAvailabilityTest, EmptyMemoriesAreFullyAvailable) {
  const NetworkGraph g = path_graph(2);
  const std::vector<int> occ{0, 0};
  EXPECT_DOUBLE_EQ(link_availability(g.link(0), g, occ), 1.0);
}

TEST(LinkAvailabilityTest, FullEndpointSaturates) {
  const NetworkGraph g = path_graph(2);
  const std::vector<int> occ{4, 0};
  EXPECT_DOUBLE_EQ(link_availability(g.link(0), g, occ), 0.0);
}

TEST(LinkAvailabilityTest, MinimumOfFreeRatios) {
  const NetworkGraph g = path_graph(2);
  const std::vector<int> occ{3, 2};  // 1/4 and 2/4 free
  EXPECT_DOUBLE_EQ(link_availability(0, 1, g, occ), 0.25);
  EXPECT_DOUBLE_EQ(link_availability(1, 0, g, occ), 0.25);
}

TEST(SlotDemandTest, EndpointsOneIntermediatesTwo) {
  RoutePath p;
  p.node_sequence = {5, 2, 1, 2, 7};
  EXPECT_EQ(slot_demand(p), (std::vector<std::pair<NodeId, int>>{
                                {1, 2}, {2, 4}, {5, 1}, {7, 1}}));
  EXPECT_EQ(p.bsm_depth(), 3);
  EXPECT_EQ(p.link_count(), 4u);
  EXPECT_EQ(p.link_sequence(), (std::vector<std::pair<NodeId, NodeId>>{
                                   {5, 2}, {2, 1}, {1, 2}, {2, 7}}));
}

TEST(SlotDemandTest, FitsAndReserve) {
  const NetworkGraph g = path_graph(3, 2);
  RoutePath p;
  p.node_sequence = {0, 1, 2};
  std::vector<int> occ{0, 0, 0};
  EXPECT_TRUE(fits(p, g, occ));
  reserve(p, occ);
  EXPECT_EQ(occ, (std::vector<int>{1, 2, 1}));
  EXPECT_FALSE(fits(p, g, occ));
}

class ScoreTest : public ::testing::Test {
 protected:
  // Path 0-1-2-3-4-5 rooted at 0; node d sits at depth d.
  NetworkGraph graph_ = path_graph(6);
  Dodag dodag_ = Dodag::converge(graph_, 0);
};

TEST_F(ScoreTest, DepthThreeFullyAvailable) {
  const std::vector<int> occ(6, 0);
  RoutePath p = path_via(4, 3, 3, dodag_);
  EXPECT_DOUBLE_EQ(score_path(p, {graph_, dodag_, occ}), 4.0);
}

TEST_F(ScoreTest, RootAnchorFullyAvailable) {
  const std::vector<int> occ(6, 0);
  RoutePath p = path_via(2, 0, 0, dodag_);
  EXPECT_DOUBLE_EQ(score_path(p, {graph_, dodag_, occ}), 1.0);
}

TEST_F(ScoreTest, DepthThreeWorstLinkHalfAvailable) {
  std::vector<int> occ(6, 0);
  occ[4] = 2;  // 2 of 4 free on link 3-4
  RoutePath p = path_via(4, 3, 3, dodag_);
  EXPECT_NEAR(score_path(p, {graph_, dodag_, occ}), 4.0 / 1.5, 1e-12);
}

TEST_F(ScoreTest, MonotoneInDepthAndCongestion) {
  std::vector<int> occ(6, 0);
  double previous = 0.0;
  for (NodeId anchor = 0; anchor <= 4; ++anchor) {
    const double s = score_path(path_via(5, anchor, anchor, dodag_),
                                {graph_, dodag_, occ});
    EXPECT_GT(s, previous);
    previous = s;
  }
  previous = 1e9;
  for (int q = 0; q < 4; ++q) {
    occ[5] = q;
    const double s = score_path(path_via(5, 4, 4, dodag_), {graph_, dodag_, occ});
    EXPECT_LT(s, previous);
    previous = s;
  }
}

TEST(CandidateTest, SiblingsGetParentThenRoot) {
  // 0 - 1, with 1 the parent of leaves 2 and 3.
  std::vector<NodeSpec> nodes{{0}, {1}, {2}, {3}};
  std::vector<LinkSpec> links{{0, 1}, {1, 2}, {1, 3}};
  const NetworkGraph g(nodes, links);
  const Dodag d = Dodag::converge(g, 0);
  const std::vector<int> occ(4, 0);
  const auto c = generate_candidate_paths(req(0, 2, 3), {g, d, occ});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].anchor, 1u);
  EXPECT_EQ(c[0].node_sequence, (std::vector<NodeId>{2, 1, 3}));
  EXPECT_EQ(c[0].bsm_depth(), 1);
  EXPECT_EQ(c[1].anchor, 0u);
  EXPECT_EQ(c[1].node_sequence, (std::vector<NodeId>{2, 1, 0, 1, 3}));
  EXPECT_GE(c[1].bsm_depth(), 2);
}

TEST(CandidateTest, AncestorEndpointGivesDirectSegment) {
  const NetworkGraph g = path_graph(5);
  const Dodag d = Dodag::converge(g, 0);
  const std::vector<int> occ(5, 0);
  const auto c = generate_candidate_paths(req(0, 4, 2), {g, d, occ});
  ASSERT_FALSE(c.empty());
  EXPECT_EQ(c[0].anchor, 2u);
  EXPECT_EQ(c[0].node_sequence, (std::vector<NodeId>{4, 3, 2}));
}

TEST(CandidateTest, SaturatedCandidatesAreDropped) {
  const NetworkGraph g = path_graph(5);
  const Dodag d = Dodag::converge(g, 0);
  std::vector<int> occ(5, 0);
  occ[3] = 4;
  EXPECT_TRUE(generate_candidate_paths(req(0, 4, 2), {g, d, occ}).empty());
  // Three of four slots taken: an intermediate occurrence needs two.
  occ[3] = 3;
  EXPECT_TRUE(generate_candidate_paths(req(0, 4, 2), {g, d, occ}).empty());
  occ[3] = 2;
  EXPECT_EQ(generate_candidate_paths(req(0, 4, 2), {g, d, occ}).size(), 3u);
}

TEST(CandidateTest, OrderMatchesCommonAncestorList) {
  const NetworkGraph g = build_random(80, 4.0, 12);
  const Dodag d = Dodag::converge(g, g.center());
  const std::vector<int> occ(g.node_count(), 0);
  for (NodeId s = 0; s < 80; s += 3) {
    for (NodeId t = 1; t < 80; t += 5) {
      if (s == t) continue;
      const auto c = generate_candidate_paths(req(0, s, t), {g, d, occ});
      const std::vector<NodeId> ca = d.find_common_ancestors(s, t);
      ASSERT_EQ(c.size(), ca.size());
      for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(c[i].anchor, ca[i]);
    }
  }
}

TEST(CandidateTest, RandomGraphPathsPassIndependentValidator) {
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const NetworkGraph g = build_random(100, 4.0, seed);
    const Dodag d = Dodag::converge(g, g.center());
    std::vector<int> occ(g.node_count());
    for (int& q : occ) q = std::uniform_int_distribution<int>(0, 2)(rng);
    for (int i = 0; i < 200; ++i) {
      const NodeId s = std::uniform_int_distribution<NodeId>(0, 99)(rng);
      const NodeId t = std::uniform_int_distribution<NodeId>(0, 99)(rng);
      if (s == t) continue;
      for (const RoutePath& p : generate_candidate_paths(req(0, s, t), {g, d, occ})) {
        EXPECT_EQ(testing::check_route(g, d, s, t, p), "");
        EXPECT_EQ(std::count(p.node_sequence.begin(), p.node_sequence.end(),
                             p.anchor), 1);
        EXPECT_TRUE(fits(p, g, occ));
      }
    }
  }
}

TEST(BetterPathTest, ScoreThenDepthThenSequence) {
  RoutePath a;
  RoutePath b;
  a.score = 2.0;
  b.score = 1.0;
  EXPECT_TRUE(better_path(a, b));
  b.score = 2.0;
  a.node_sequence = {1, 2, 3};
  b.node_sequence = {1, 2, 4, 3};
  EXPECT_TRUE(better_path(a, b));
  b.node_sequence = {1, 5, 3};
  EXPECT_TRUE(better_path(a, b));
  EXPECT_FALSE(better_path(b, a));
}

TEST(RadarQScheduleTest, DeeperNcaGoesFirst) {
  const NetworkGraph g = path_graph(5);
  const Dodag d = Dodag::converge(g, 0);
  const std::vector<int> occ(5, 0);
  // (B, C) = (1, 2) has NCA depth 1; (D, E) = (3, 4) has NCA depth 3.
  const std::vector<Request> rs{req(0, 1, 2), req(1, 3, 4)};
  const auto out = radar_q_schedule(rs, {g, d, occ});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].request.id, 1u);
  EXPECT_EQ(out[1].request.id, 0u);
}

TEST(RadarQScheduleTest, EqualDepthsKeepIdOrder) {
  const NetworkGraph g = star(5);
  const Dodag d = Dodag::converge(g, 0);
  const std::vector<int> occ(6, 0);
  const std::vector<Request> rs{req(3, 1, 2), req(1, 3, 4)};
  const auto out = radar_q_schedule(rs, {g, d, occ});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].request.id, 1u);
  EXPECT_EQ(out[1].request.id, 3u);
}

TEST(RadarQScheduleTest, AllSaturatedMeansEmptySchedule) {
  const NetworkGraph g = path_graph(3);
  const Dodag d = Dodag::converge(g, 0);
  const std::vector<int> occ{0, 4, 0};
  const std::vector<Request> rs{req(0, 2, 0)};
  EXPECT_TRUE(radar_q_schedule(rs, {g, d, occ}).empty());
}

TEST(RadarQScheduleTest, EarlierChoicesConsumeMemory) {
  // Three root-crossing requests on a star with M = 4 at the hub: only two
  // fit because each needs two hub slots.
  const NetworkGraph g = star(6);
  const Dodag d = Dodag::converge(g, 0);
  const std::vector<int> occ(7, 0);
  const std::vector<Request> rs{req(0, 1, 2), req(1, 3, 4), req(2, 5, 6)};
  const auto out = radar_q_schedule(rs, {g, d, occ});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].request.id, 0u);
  EXPECT_EQ(out[1].request.id, 1u);
}

TEST(RadarQScheduleTest, CongestionLowersTheChosenScore) {
  // Sibling leaves 2, 3 under 1 under root 0. Half of node 1's memory is
  // taken: the walk through the root would need all four of its slots, so
  // only the local anchor survives, scoring (1 + 1) / (1 + 0.5).
  std::vector<NodeSpec> nodes{{0}, {1}, {2}, {3}};
  std::vector<LinkSpec> links{{0, 1}, {1, 2}, {1, 3}};
  const NetworkGraph g(nodes, links);
  const Dodag d = Dodag::converge(g, 0);
  std::vector<int> occ{0, 2, 0, 0};
  const std::vector<Request> rs{req(0, 2, 3)};
  const auto out = radar_q_schedule(rs, {g, d, occ});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].path.anchor, 1u);
  EXPECT_NEAR(out[0].path.score, 2.0 / 1.5, 1e-12);
}

TEST(RadarQScheduleTest, NeverSchedulesThroughSaturatedLinks) {
  std::mt19937_64 rng(41);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const NetworkGraph g = build_random(100, 4.0, seed);
    const Dodag d = Dodag::converge(g, g.center());
    std::vector<int> occ(g.node_count());
    for (int& q : occ) q = std::uniform_int_distribution<int>(0, 4)(rng);
    std::vector<Request> rs;
    for (RequestId i = 0; i < 10; ++i) {
      const NodeId s = std::uniform_int_distribution<NodeId>(0, 99)(rng);
      const NodeId t = (s + 1 + std::uniform_int_distribution<NodeId>(0, 98)(rng)) % 100;
      rs.push_back(req(i, s, t));
    }
    std::vector<int> running = occ;
    for (const Assignment& a : radar_q_schedule(rs, {g, d, occ})) {
      for (const auto& [u, v] : a.path.link_sequence()) {
        EXPECT_GT(link_availability(u, v, g, running), 0.0);
      }
      EXPECT_TRUE(fits(a.path, g, running));
      const RoutePath root = path_via(a.request.source, a.request.destination,
                                      d.root(), d);
      EXPECT_LE(a.path.bsm_depth(), root.bsm_depth());
      reserve(a.path, running);
    }
  }
}

TEST(AsynchRootScheduleTest, RootNcaMatchesRadarQ) {
  const NetworkGraph g = build_grid(5, 5);
  const Dodag d = Dodag::converge(g, 12);
  const std::vector<int> occ(25, 0);
  // 0 and 24 sit in different quadrants, so the root is their only common
  // ancestor.
  ASSERT_EQ(d.nca(0, 24), 12u);
  const std::vector<Request> rs{req(0, 0, 24)};
  const auto a = asynch_root_schedule(rs, {g, d, occ});
  const auto r = radar_q_schedule(rs, {g, d, occ});
  ASSERT_EQ(a.size(), 1u);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(a[0].path.node_sequence, r[0].path.node_sequence);
}

TEST(AsynchRootScheduleTest, IgnoresLocalNca) {
  const NetworkGraph g = path_graph(6);
  const Dodag d = Dodag::converge(g, 0);
  const std::vector<int> occ(6, 0);
  // NCA(5, 4) = 4 at depth 4; the root walk still goes all the way up.
  const std::vector<Request> rs{req(0, 5, 4)};
  const auto out = asynch_root_schedule(rs, {g, d, occ});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].path.anchor, 0u);
  EXPECT_EQ(out[0].path.link_count(), static_cast<std::size_t>(d.depth(5) + d.depth(4)));
}

TEST(AsynchRootScheduleTest, TenRequestsAllCrossTheRoot) {
  const NetworkGraph g = build_random(100, 4.0, 2);
  const Dodag d = Dodag::converge(g, g.center());
  std::vector<int> occ(100, 4);  // contention does not matter
  std::vector<Request> rs;
  for (RequestId i = 0; i < 10; ++i) rs.push_back(req(9 - i, 2 * i, 2 * i + 1));
  const auto out = asynch_root_schedule(rs, {g, d, occ});
  ASSERT_EQ(out.size(), 10u);
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_EQ(out[i].request.id, i);
    const auto& seq = out[i].path.node_sequence;
    EXPECT_NE(std::find(seq.begin(), seq.end(), d.root()), seq.end());
  }
}

TEST(AsynchRootScheduleTest, StarMatchesRadarQForEveryPairOfRequests) {
  const NetworkGraph g = star(5);
  const Dodag d = Dodag::converge(g, 0);
  const std::vector<int> occ(6, 0);
  int compared = 0;
  for (NodeId a = 1; a <= 5; ++a) {
    for (NodeId b = 1; b <= 5; ++b) {
      for (NodeId c = 1; c <= 5; ++c) {
        for (NodeId e = 1; e <= 5; ++e) {
          if (a == b || c == e) continue;
          const std::vector<Request> rs{req(0, a, b), req(1, c, e)};
          const auto x = asynch_root_schedule(rs, {g, d, occ});
          const auto y = radar_q_schedule(rs, {g, d, occ});
          ASSERT_EQ(x.size(), y.size());
          for (std::size_t i = 0; i < x.size(); ++i) {
            EXPECT_EQ(x[i].request.id, y[i].request.id);
            EXPECT_EQ(x[i].path.node_sequence, y[i].path.node_sequence);
          }
          ++compared;
        }
      }
    }
  }
  EXPECT_EQ(compared, 400);
}

TEST(SynchNcaScheduleTest, DisjointRequestsBothServed) {
  const NetworkGraph g = path_graph(6);
  const Dodag d = Dodag::converge(g, 0);
  const std::vector<int> occ(6, 0);
  const std::vector<Request> rs{req(0, 0, 1), req(1, 4, 5)};
  const SlotPlan plan = synch_nca_schedule(rs, {g, d, occ});
  EXPECT_EQ(plan.assigned.size(), 2u);
  EXPECT_TRUE(plan.deferred.empty());
}

TEST(SynchNcaScheduleTest, SharedNodeCapacityArithmetic) {
  // Both paths end at node 1: one slot each.
  const std::vector<Request> rs{req(0, 0, 1), req(1, 1, 2)};
  {
    const NetworkGraph g = path_graph(3, 2);
    const Dodag d = Dodag::converge(g, 0);
    const std::vector<int> occ(3, 0);
    const SlotPlan plan = synch_nca_schedule(rs, {g, d, occ});
    EXPECT_EQ(plan.assigned.size(), 2u);
    EXPECT_TRUE(plan.deferred.empty());
  }
  {
    const NetworkGraph g = path_graph(3, 1);
    const Dodag d = Dodag::converge(g, 0);
    const std::vector<int> occ(3, 0);
    const SlotPlan plan = synch_nca_schedule(rs, {g, d, occ});
    EXPECT_EQ(plan.assigned.size(), 1u);
    ASSERT_EQ(plan.deferred.size(), 1u);
  }
}

TEST(SynchNcaScheduleTest, UsesNcaPaths) {
  const NetworkGraph g = build_grid(6, 6);
  const Dodag d = Dodag::converge(g, 14);
  const std::vector<int> occ(36, 0);
  const std::vector<Request> rs{req(0, 0, 7), req(1, 35, 29), req(2, 5, 30)};
  const SlotPlan plan = synch_nca_schedule(rs, {g, d, occ});
  for (const Assignment& a : plan.assigned) {
    EXPECT_EQ(a.path.anchor, d.nca(a.request.source, a.request.destination));
  }
}

}  // namespace
}  // namespace radarq
