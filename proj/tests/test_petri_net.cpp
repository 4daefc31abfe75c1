#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "driftscan/petri_net.hpp"
#include "driftscan/process_tree.hpp"
#include "fixtures.hpp"

using namespace driftscan;

namespace {

std::set<std::string> enabled_set(const PetriNet& net, const Marking& m) {
  std::set<std::string> labels;
  for (std::size_t t : enabled(net, m)) labels.insert(net.transitions()[t].id);
  return labels;
}

std::size_t transition_index(const PetriNet& net, const std::string& id) {
  for (std::size_t t = 0; t < net.transitions().size(); ++t)
    if (net.transitions()[t].id == id) return t;
  FAIL("no transition " + id);
  return 0;
}

// Exhaustive play-out of an acyclic net: every trace of labels reachable
// from the initial to the final marking. Independent oracle for OLP.
void enumerate_traces(const PetriNet& net, const Marking& m,
                      std::vector<std::string>& prefix,
                      std::set<std::vector<std::string>>& out) {
  if (m == net.final_marking()) out.insert(prefix);
  for (std::size_t t : enabled(net, m)) {
    const auto& tr = net.transitions()[t];
    if (!tr.silent()) prefix.push_back(tr.label);
    Marking next = fire(net, m, t);
    enumerate_traces(net, next, prefix, out);
    if (!tr.silent()) prefix.pop_back();
  }
}

OlpSet olp_by_playout(const PetriNet& net) {
  std::set<std::vector<std::string>> traces;
  std::vector<std::string> prefix;
  Marking m0 = net.initial_marking();
  enumerate_traces(net, m0, prefix, traces);
  OlpSet olp;
  for (const auto& t : traces)
    for (std::size_t i = 0; i + 1 < t.size(); ++i) olp.emplace(t[i], t[i + 1]);
  return olp;
}

}  // namespace

TEST_CASE("only the start transition is enabled initially", "[petri_net]") {
  const PetriNet net = fixtures::parallel_net();
  CHECK(enabled_set(net, net.initial_marking()) == std::set<std::string>{"A"});

  Marking empty = net.initial_marking();
  empty.tokens.assign(empty.tokens.size(), 0);
  CHECK(enabled(net, empty).empty());
}

TEST_CASE("firing the split enables both branches", "[petri_net]") {
  const PetriNet net = fixtures::parallel_net();
  const Marking after_a =
      fire(net, net.initial_marking(), transition_index(net, "A"));
  CHECK(enabled_set(net, after_a) == std::set<std::string>{"B", "C"});
  CHECK(after_a.total() == 2);
}

TEST_CASE("firing a disabled join is a contract violation", "[petri_net]") {
  const PetriNet net = fixtures::parallel_net();
  const Marking after_a =
      fire(net, net.initial_marking(), transition_index(net, "A"));
  const Marking after_b = fire(net, after_a, transition_index(net, "B"));
  CHECK_THROWS_AS(fire(net, after_b, transition_index(net, "D")), net_error);
}

TEST_CASE("token conservation on every fire", "[petri_net][property]") {
  const PetriNet net = fixtures::parallel_net();
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    Marking m = net.initial_marking();
    while (true) {
      const auto ts = enabled(net, m);
      if (ts.empty()) break;
      std::uniform_int_distribution<std::size_t> pick(0, ts.size() - 1);
      const std::size_t t = ts[pick(rng)];
      const auto& tr = net.transitions()[t];
      const Marking next = fire(net, m, t);
      CHECK(next.total() == m.total() - static_cast<std::int64_t>(tr.pre.size()) +
                                static_cast<std::int64_t>(tr.post.size()));
      m = next;
    }
  }
}

TEST_CASE("parallel interleavings replay on the parallel net", "[petri_net]") {
  const PetriNet net = fixtures::parallel_net();
  CHECK(is_replayable(net, fixtures::make_trace("ACBDEG")));
  CHECK(is_replayable(net, fixtures::make_trace("ABCDFG")));
  CHECK_FALSE(is_replayable(net, fixtures::make_trace("ABCDEF")));
  CHECK_FALSE(is_replayable(net, fixtures::make_trace("ABCDE")));  // stops early
  CHECK_FALSE(is_replayable(net, fixtures::make_trace("")));
}

TEST_CASE("reordered branch does not replay on the sequential net",
          "[petri_net]") {
  const PetriNet net = fixtures::sequential_net();
  CHECK(is_replayable(net, fixtures::make_trace("ABCDEG")));
  CHECK_FALSE(is_replayable(net, fixtures::make_trace("ACBDEG")));
}

TEST_CASE("replay is deterministic", "[petri_net][property]") {
  const PetriNet net = fixtures::parallel_net();
  const std::vector<std::string> shapes{"ABCDEG", "ACBDFG", "ABDCEG", "AA", ""};
  for (const auto& s : shapes) {
    const Trace trace = fixtures::make_trace(s);
    const bool first = is_replayable(net, trace);
    for (int i = 0; i < 5; ++i) CHECK(is_replayable(net, trace) == first);
  }
}

TEST_CASE("tiny budget raises a budget error, not false", "[petri_net]") {
  const PetriNet net = fixtures::parallel_net();
  CHECK_THROWS_AS(is_replayable(net, fixtures::make_trace("ABCDEG"), 2),
                  replay_budget_error);
}

TEST_CASE("olp of the parallel example net", "[petri_net]") {
  const OlpSet olp = extract_olp(fixtures::parallel_net());
  const OlpSet expected{{"A", "B"}, {"A", "C"}, {"B", "D"}, {"C", "D"},
                        {"D", "E"}, {"D", "F"}, {"E", "G"}, {"F", "G"}};
  CHECK(olp == expected);
}

TEST_CASE("olp of a two-activity chain", "[petri_net]") {
  PetriNet::Builder b;
  b.place("p0").place("p1").place("p2");
  b.transition("A", "A").transition("B", "B");
  b.arc("p0", "A").arc("A", "p1").arc("p1", "B").arc("B", "p2");
  CHECK(extract_olp(b.build()) == OlpSet{{"A", "B"}});
}

TEST_CASE("olp traverses silent splits", "[petri_net]") {
  // B, then a silent AND-split into an E-F branch and a G branch
  const ProcessTree tree =
      seq({leaf("B"), parallel({seq({leaf("E"), leaf("F")}), leaf("G")})});
  const OlpSet olp = extract_olp(to_net(tree));
  CHECK(olp.count({"B", "E"}) == 1);
  CHECK(olp.count({"B", "G"}) == 1);
  CHECK(olp.count({"E", "F"}) == 1);
  CHECK(olp.count({"B", "F"}) == 0);
}

TEST_CASE("olp equals adjacent pairs of exhaustive play-out on acyclic nets",
          "[petri_net][property]") {
  const std::vector<ProcessTree> models{
      seq({leaf("A"), parallel({leaf("B"), leaf("C")}), leaf("D"),
           exclusive({leaf("E"), leaf("F")}), leaf("G")}),
      seq({leaf("A"), exclusive({seq({leaf("B"), leaf("C")}), leaf("D")}),
           leaf("E")}),
      parallel({seq({leaf("A"), leaf("B")}), seq({leaf("C"), leaf("D")})}),
      seq({leaf("A"), exclusive({leaf("B"), silent()}), leaf("C")}),
      exclusive({seq({leaf("A"), leaf("B")}),
                 seq({leaf("C"), parallel({leaf("D"), leaf("E")})})}),
  };
  for (const auto& tree : models) {
    const PetriNet net = to_net(tree);
    REQUIRE(net.transitions().size() <= 12);
    CHECK(extract_olp(net) == olp_by_playout(net));
  }
}

TEST_CASE("pnml round trip preserves the net", "[petri_net]") {
  const PetriNet net = fixtures::parallel_net();
  std::stringstream buffer;
  write_pnml(buffer, net);
  const PetriNet round = read_pnml(buffer);

  auto sorted_arcs = [](const PetriNet& n) {
    auto arcs = n.arcs();
    std::sort(arcs.begin(), arcs.end());
    return arcs;
  };
  auto sorted_places = [](const PetriNet& n) {
    auto p = n.place_ids();
    std::sort(p.begin(), p.end());
    return p;
  };
  CHECK(sorted_places(round) == sorted_places(net));
  CHECK(sorted_arcs(round) == sorted_arcs(net));
  CHECK(round.transitions().size() == net.transitions().size());

  // serialization is stable: writing the reread net gives identical bytes
  std::stringstream again;
  write_pnml(again, round);
  CHECK(again.str() == buffer.str());
}

TEST_CASE("silent transitions survive pnml round trips", "[petri_net]") {
  const PetriNet net =
      to_net(seq({leaf("A"), exclusive({leaf("B"), silent()}), leaf("C")}));
  std::stringstream buffer;
  write_pnml(buffer, net);
  const PetriNet round = read_pnml(buffer);
  std::size_t silents = 0;
  for (const auto& t : round.transitions())
    if (t.silent()) ++silents;
  CHECK(silents == 1);
  CHECK(is_replayable(round, fixtures::make_trace("AC")));
  CHECK(is_replayable(round, fixtures::make_trace("ABC")));
}

TEST_CASE("structural validation rejects broken nets", "[petri_net]") {
  {  // two sources
    PetriNet::Builder b;
    b.place("p0").place("p1").place("p2");
    b.transition("A", "A");
    b.arc("p0", "A").arc("A", "p2");
    CHECK_THROWS_AS(b.build(), net_error);
  }
  {  // disconnected place
    PetriNet::Builder b;
    b.place("p0").place("p1");
    b.transition("A", "A");
    b.arc("p0", "A").arc("A", "p1").arc("p1", "A");
    CHECK_THROWS_AS(b.build(), net_error);
  }
  {  // id clash between place and transition
    PetriNet::Builder b;
    b.place("x").place("p1");
    b.transition("x", "X");
    CHECK_THROWS_AS(b.arc("x", "x").build(), net_error);
  }
}
