#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "driftscan/discovery.hpp"
#include "driftscan/loggen.hpp"
#include "fixtures.hpp"

using namespace driftscan;

namespace {

SlidingWindow whole(const EventLog& log) {
  return window_at(log, 0, log.size());
}

// approximate language equivalence: every probe trace of each model
// replays on the other's net
void check_language_equivalent(const ProcessTree& a, const ProcessTree& b,
                               std::uint64_t seed, std::size_t probes = 1000) {
  const PetriNet net_a = to_net(a);
  const PetriNet net_b = to_net(b);
  const EventLog probe_a = play_out(a, probes, seed);
  const EventLog probe_b = play_out(b, probes, seed + 1);
  for (const Trace& t : probe_a.traces) {
    INFO("trace of first model: " << t.id);
    REQUIRE(is_replayable(net_b, t));
  }
  for (const Trace& t : probe_b.traces) {
    INFO("trace of second model: " << t.id);
    REQUIRE(is_replayable(net_a, t));
  }
}

}  // namespace

TEST_CASE("dfg of a single two-step trace", "[discovery]") {
  const EventLog log = fixtures::make_log({"AB"});
  const Dfg dfg = build_dfg(whole(log));
  CHECK(dfg.activities == std::set<std::string>{"A", "B"});
  REQUIRE(dfg.edges.size() == 1);
  CHECK(dfg.edges.at({"A", "B"}) == 1);
  CHECK(dfg.start_activities == std::set<std::string>{"A"});
  CHECK(dfg.end_activities == std::set<std::string>{"B"});
}

TEST_CASE("dfg edges of the nine-trace example log", "[discovery]") {
  const EventLog log = fixtures::pc_example_log();
  const Dfg dfg = build_dfg(whole(log));
  const std::set<ActivityPair> expected{{"A", "B"}, {"A", "C"}, {"B", "C"},
                                        {"B", "D"}, {"C", "B"}, {"C", "D"},
                                        {"D", "E"}, {"E", "G"}};
  std::set<ActivityPair> edges;
  for (const auto& [edge, count] : dfg.edges) {
    CHECK(count > 0);
    edges.insert(edge);
  }
  CHECK(edges == expected);
}

TEST_CASE("dfg of two swapped traces", "[discovery]") {
  const EventLog log = fixtures::make_log({"ABC", "ACB"});
  const Dfg dfg = build_dfg(whole(log));
  std::set<ActivityPair> edges;
  for (const auto& [edge, count] : dfg.edges) edges.insert(edge);
  CHECK(edges == std::set<ActivityPair>{{"A", "B"}, {"B", "C"}, {"A", "C"},
                                        {"C", "B"}});
}

TEST_CASE("two-trace window discovers a sequence", "[discovery]") {
  const EventLog log = fixtures::make_log({"AB"});
  const ProcessTree tree = discover_tree(whole(log));
  CHECK(tree == seq({leaf("A"), leaf("B")}));
}

TEST_CASE("four interleavings rediscover the parallel model", "[discovery]") {
  const EventLog log =
      fixtures::make_log({"ABCDEG", "ACBDEG", "ABCDFG", "ACBDFG"});
  const ProcessTree tree = discover_tree(whole(log));
  CHECK(tree == seq({leaf("A"), parallel({leaf("B"), leaf("C")}), leaf("D"),
                     exclusive({leaf("E"), leaf("F")}), leaf("G")}));
}

TEST_CASE("two sequential shapes discover the sequential model",
          "[discovery]") {
  const EventLog log = fixtures::make_log({"ABCDEG", "ABCDFG"});
  const ProcessTree tree = discover_tree(whole(log));
  CHECK(tree == seq({leaf("A"), leaf("B"), leaf("C"), leaf("D"),
                     exclusive({leaf("E"), leaf("F")}), leaf("G")}));
}

TEST_CASE("skips discover an optional fragment", "[discovery]") {
  const EventLog log = fixtures::make_log({"AC", "ABC", "ABC", "AC"});
  const ProcessTree tree = discover_tree(whole(log));
  CHECK(tree == seq({leaf("A"), exclusive({silent(), leaf("B")}), leaf("C")}));
}

TEST_CASE("repeats discover a loop", "[discovery]") {
  const EventLog log = fixtures::make_log({"ABBC", "ABC", "ABBBC"});
  const ProcessTree tree = discover_tree(whole(log));
  CHECK(tree ==
        seq({leaf("A"), loop({leaf("B"), silent()}), leaf("C")}));
}

TEST_CASE("multi-activity tandem repeats discover a tau loop", "[discovery]") {
  const EventLog log = fixtures::make_log({"BC", "BCBC", "BCBCBC"});
  const ProcessTree tree = discover_tree(whole(log));
  CHECK(tree == loop({seq({leaf("B"), leaf("C")}), silent()}));
}

TEST_CASE("discovery is total on cutless logs and keeps perfect fitness",
          "[discovery]") {
  const EventLog log = fixtures::make_log({"AB", "BA", "ABA", "BAB"});
  const PetriNet net = discover(whole(log));
  for (const Trace& trace : log.traces) {
    REQUIRE(is_replayable(net, trace));
  }
}

TEST_CASE("discovery is deterministic", "[discovery]") {
  const EventLog log = fixtures::drift_log_parallel_to_sequential();
  const ProcessTree first = discover_tree(window_at(log, 0, 8));
  for (int i = 0; i < 3; ++i) {
    CHECK(discover_tree(window_at(log, 0, 8)) == first);
  }
}

TEST_CASE("every window trace replays on the discovered net",
          "[discovery][property]") {
  const ProcessTree model = loan_model();
  const EventLog log = play_out(model, 600, 99);
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> start(0, log.size() - 30);
  std::uniform_int_distribution<std::size_t> width(2, 30);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t i = start(rng);
    const std::size_t n = std::min(width(rng), log.size() - i);
    if (n < 1) continue;
    const SlidingWindow window = window_at(log, i, n);
    const PetriNet net = discover(window);
    for (const Trace& trace : window) {
      INFO("window [" << i << ", " << i + n << ") trace " << trace.id);
      REQUIRE(is_replayable(net, trace));
    }
  }
}

TEST_CASE("bundled variants are rediscovered from 500-trace play-outs",
          "[discovery][rediscovery]") {
  const ProcessTree base = loan_model();
  for (const std::string pattern : {"pl", "cf", "cb", "lp"}) {
    INFO("pattern " << pattern);
    const ProcessTree variant = apply_pattern(
        base, pattern, default_selector(pattern), default_replacement(pattern));
    const EventLog log = play_out(variant, 500, 1234);
    const ProcessTree mined = discover_tree(window_at(log, 0, log.size()));
    check_language_equivalent(variant, mined, 4321);
  }
}

TEST_CASE("base model is rediscovered from a 500-trace play-out",
          "[discovery][rediscovery]") {
  const ProcessTree base = loan_model();
  const EventLog log = play_out(base, 500, 77);
  const ProcessTree mined = discover_tree(window_at(log, 0, log.size()));
  check_language_equivalent(base, mined, 78);
}
