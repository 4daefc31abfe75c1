#pragma once

// Shared fixtures: the small two-model example (parallel vs sequential
// handling of B and C) and helpers to build logs from activity strings.

#include <string>
#include <vector>

#include "driftscan/event_log.hpp"
#include "driftscan/petri_net.hpp"
#include "driftscan/process_tree.hpp"

namespace fixtures {

// A, then B and C in parallel, then D, then one of E/F, then G.
inline driftscan::PetriNet parallel_net() {
  driftscan::PetriNet::Builder b;
  for (int i = 1; i <= 8; ++i) b.place("p" + std::to_string(i));
  b.transition("A", "A").transition("B", "B").transition("C", "C");
  b.transition("D", "D").transition("E", "E").transition("F", "F");
  b.transition("G", "G");
  b.arc("p1", "A").arc("A", "p2").arc("A", "p3");
  b.arc("p2", "B").arc("B", "p4");
  b.arc("p3", "C").arc("C", "p5");
  b.arc("p4", "D").arc("p5", "D").arc("D", "p6");
  b.arc("p6", "E").arc("E", "p7");
  b.arc("p6", "F").arc("F", "p7");
  b.arc("p7", "G").arc("G", "p8");
  return b.build();
}

// Same activities fully sequential: A B C D (E|F) G.
inline driftscan::PetriNet sequential_net() {
  driftscan::PetriNet::Builder b;
  for (int i = 1; i <= 7; ++i) b.place("p" + std::to_string(i));
  b.transition("A", "A").transition("B", "B").transition("C", "C");
  b.transition("D", "D").transition("E", "E").transition("F", "F");
  b.transition("G", "G");
  b.arc("p1", "A").arc("A", "p2");
  b.arc("p2", "B").arc("B", "p3");
  b.arc("p3", "C").arc("C", "p4");
  b.arc("p4", "D").arc("D", "p5");
  b.arc("p5", "E").arc("E", "p6");
  b.arc("p5", "F").arc("F", "p6");
  b.arc("p6", "G").arc("G", "p7");
  return b.build();
}

inline driftscan::Trace make_trace(const std::string& activities,
                                   const std::string& id = "t") {
  driftscan::Trace trace;
  trace.id = id;
  for (char c : activities) {
    trace.events.push_back(
        driftscan::Event{std::string(1, c), id, std::nullopt});
  }
  return trace;
}

inline driftscan::EventLog make_log(const std::vector<std::string>& traces) {
  driftscan::EventLog log;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    log.traces.push_back(make_trace(traces[i], "t" + std::to_string(i)));
  }
  return log;
}

// 16-trace log: first half from the parallel model, second half from the
// sequential one (precision-visible change).
inline driftscan::EventLog drift_log_parallel_to_sequential() {
  return make_log({"ABCDEG", "ACBDEG", "ABCDFG", "ACBDFG",
                   "ABCDEG", "ACBDEG", "ABCDFG", "ACBDFG",
                   "ABCDEG", "ABCDFG", "ABCDEG", "ABCDFG",
                   "ABCDEG", "ABCDFG", "ABCDEG", "ABCDFG"});
}

// 16-trace log: sequential first, parallel afterwards (fitness-visible).
inline driftscan::EventLog drift_log_sequential_to_parallel() {
  return make_log({"ABCDEG", "ABCDFG", "ABCDEG", "ABCDFG",
                   "ABCDEG", "ABCDFG", "ABCDEG", "ABCDFG",
                   "ABCDEG", "ACBDEG", "ABCDFG", "ACBDFG",
                   "ABCDEG", "ACBDEG", "ABCDFG", "ACBDFG"});
}

// Nine-trace log over the parallel net where no trace takes the F branch.
inline driftscan::EventLog pc_example_log() {
  return make_log({"ABCDEG", "ACBDEG", "ABCDEG", "ACBDEG", "ACBDEG",
                   "ABCDEG", "ABCDEG", "ACBDEG", "ABCDEG"});
}

}  // namespace fixtures
