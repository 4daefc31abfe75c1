#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "driftscan/event_log.hpp"

namespace driftscan {

struct net_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct replay_budget_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Marking {
  std::vector<std::int32_t> tokens;  // indexed by place

  friend bool operator==(const Marking&, const Marking&) = default;

  std::int64_t total() const {
    std::int64_t sum = 0;
    for (auto t : tokens) sum += t;
    return sum;
  }
};

struct MarkingHash {
  std::size_t operator()(const Marking& m) const {
    std::size_t h = 0xcbf29ce484222325ull;
    for (auto t : m.tokens) {
      h ^= static_cast<std::size_t>(t) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

using OlpSet = std::set<ActivityPair>;

/// Workflow-shaped Petri net: unique source place (no inputs), unique
/// sink place (no outputs), every node on a path from source to sink.
/// Transitions with an empty label are silent.
class PetriNet {
 public:
  struct Transition {
    std::string id;
    std::string label;  // empty = silent
    std::vector<std::size_t> pre;   // input place indices
    std::vector<std::size_t> post;  // output place indices

    bool silent() const { return label.empty(); }
  };

  class Builder {
   public:
    Builder& place(const std::string& id) {
      places_.push_back(id);
      return *this;
    }
    Builder& transition(const std::string& id, const std::string& label) {
      transitions_.emplace_back(id, label);
      return *this;
    }
    Builder& silent_transition(const std::string& id) {
      return transition(id, "");
    }
    Builder& arc(const std::string& from, const std::string& to) {
      arcs_.emplace_back(from, to);
      return *this;
    }
    PetriNet build() const { return PetriNet(places_, transitions_, arcs_); }

   private:
    std::vector<std::string> places_;
    std::vector<std::pair<std::string, std::string>> transitions_;
    std::vector<std::pair<std::string, std::string>> arcs_;
  };

  PetriNet(const std::vector<std::string>& places,
           const std::vector<std::pair<std::string, std::string>>& transitions,
           const std::vector<std::pair<std::string, std::string>>& arcs) {
    std::unordered_map<std::string, std::size_t> place_idx, trans_idx;
    for (const auto& p : places) {
      if (!place_idx.emplace(p, place_ids_.size()).second)
        throw net_error("duplicate place id: " + p);
      place_ids_.push_back(p);
    }
    for (const auto& [id, label] : transitions) {
      if (place_idx.count(id))
        throw net_error("id used for both place and transition: " + id);
      if (!trans_idx.emplace(id, transitions_.size()).second)
        throw net_error("duplicate transition id: " + id);
      transitions_.push_back(Transition{id, label, {}, {}});
    }
    for (const auto& [from, to] : arcs) {
      const auto pf = place_idx.find(from);
      const auto tf = trans_idx.find(from);
      const auto pt = place_idx.find(to);
      const auto tt = trans_idx.find(to);
      if (pf != place_idx.end() && tt != trans_idx.end()) {
        transitions_[tt->second].pre.push_back(pf->second);
      } else if (tf != trans_idx.end() && pt != place_idx.end()) {
        transitions_[tf->second].post.push_back(pt->second);
      } else {
        throw net_error("arc must connect a place and a transition: " + from +
                        " -> " + to);
      }
      arcs_.emplace_back(from, to);
    }
    validate();
  }

  std::size_t place_count() const { return place_ids_.size(); }
  const std::vector<std::string>& place_ids() const { return place_ids_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const std::vector<std::pair<std::string, std::string>>& arcs() const {
    return arcs_;
  }
  std::size_t source() const { return source_; }
  std::size_t sink() const { return sink_; }

  Marking initial_marking() const {
    Marking m;
    m.tokens.assign(place_count(), 0);
    m.tokens[source_] = 1;
    return m;
  }

  Marking final_marking() const {
    Marking m;
    m.tokens.assign(place_count(), 0);
    m.tokens[sink_] = 1;
    return m;
  }

  bool transition_enabled(const Marking& m, std::size_t t) const {
    for (std::size_t p : transitions_[t].pre) {
      if (m.tokens[p] < 1) return false;
    }
    return true;
  }

  std::set<std::string> activity_labels() const {
    std::set<std::string> labels;
    for (const auto& t : transitions_)
      if (!t.silent()) labels.insert(t.label);
    return labels;
  }

 private:
  void validate() {
    std::vector<bool> has_in(place_count(), false), has_out(place_count(), false);
    for (const auto& t : transitions_) {
      if (t.pre.empty() || t.post.empty())
        throw net_error("transition " + t.id + " must have inputs and outputs");
      for (std::size_t p : t.pre) has_out[p] = true;
      for (std::size_t p : t.post) has_in[p] = true;
    }
    const std::size_t n = place_count();
    std::size_t src = n, snk = n;
    for (std::size_t p = 0; p < n; ++p) {
      if (!has_in[p]) {
        if (src != n) throw net_error("multiple source places");
        src = p;
      }
      if (!has_out[p]) {
        if (snk != n) throw net_error("multiple sink places");
        snk = p;
      }
    }
    if (src == n) throw net_error("no source place");
    if (snk == n) throw net_error("no sink place");
    source_ = src;
    sink_ = snk;

    // every node must lie on some path from source to sink
    std::vector<bool> fwd_p(n, false), fwd_t(transitions_.size(), false);
    forward_reach(src, fwd_p, fwd_t);
    std::vector<bool> bwd_p(n, false), bwd_t(transitions_.size(), false);
    backward_reach(snk, bwd_p, bwd_t);
    for (std::size_t p = 0; p < n; ++p)
      if (!(fwd_p[p] && bwd_p[p]))
        throw net_error("place " + place_ids_[p] + " not on a source-sink path");
    for (std::size_t t = 0; t < transitions_.size(); ++t)
      if (!(fwd_t[t] && bwd_t[t]))
        throw net_error("transition " + transitions_[t].id +
                        " not on a source-sink path");
  }

  void forward_reach(std::size_t src, std::vector<bool>& vp,
                     std::vector<bool>& vt) const {
    std::deque<std::size_t> queue{src};
    vp[src] = true;
    while (!queue.empty()) {
      const std::size_t p = queue.front();
      queue.pop_front();
      for (std::size_t t = 0; t < transitions_.size(); ++t) {
        if (vt[t]) continue;
        const auto& pre = transitions_[t].pre;
        if (std::find(pre.begin(), pre.end(), p) == pre.end()) continue;
        vt[t] = true;
        for (std::size_t q : transitions_[t].post) {
          if (!vp[q]) {
            vp[q] = true;
            queue.push_back(q);
          }
        }
      }
    }
  }

  void backward_reach(std::size_t snk, std::vector<bool>& vp,
                      std::vector<bool>& vt) const {
    std::deque<std::size_t> queue{snk};
    vp[snk] = true;
    while (!queue.empty()) {
      const std::size_t p = queue.front();
      queue.pop_front();
      for (std::size_t t = 0; t < transitions_.size(); ++t) {
        if (vt[t]) continue;
        const auto& post = transitions_[t].post;
        if (std::find(post.begin(), post.end(), p) == post.end()) continue;
        vt[t] = true;
        for (std::size_t q : transitions_[t].pre) {
          if (!vp[q]) {
            vp[q] = true;
            queue.push_back(q);
          }
        }
      }
    }
  }

  std::vector<std::string> place_ids_;
  std::vector<Transition> transitions_;
  std::vector<std::pair<std::string, std::string>> arcs_;
  std::size_t source_ = 0;
  std::size_t sink_ = 0;
};

/// Transitions enabled at marking m (every input place has a token).
inline std::vector<std::size_t> enabled(const PetriNet& net, const Marking& m) {
  std::vector<std::size_t> result;
  for (std::size_t t = 0; t < net.transitions().size(); ++t) {
    if (net.transition_enabled(m, t)) result.push_back(t);
  }
  return result;
}

inline std::set<std::string> enabled_labels(const PetriNet& net, const Marking& m) {
  std::set<std::string> labels;
  for (std::size_t t : enabled(net, m)) {
    const auto& tr = net.transitions()[t];
    if (!tr.silent()) labels.insert(tr.label);
  }
  return labels;
}

/// Fire transition t: consume one token per input place, produce one per
/// output place. Firing a disabled transition is a contract violation.
inline Marking fire(const PetriNet& net, const Marking& m, std::size_t t) {
  if (!net.transition_enabled(m, t))
    throw net_error("transition " + net.transitions()[t].id +
                    " is not enabled in the given marking");
  Marking next = m;
  for (std::size_t p : net.transitions()[t].pre) next.tokens[p] -= 1;
  for (std::size_t p : net.transitions()[t].post) next.tokens[p] += 1;
  return next;
}

inline constexpr std::size_t kDefaultReplayBudget = 10000;

namespace detail {

using MarkingSet = std::unordered_set<Marking, MarkingHash>;

// All markings reachable from the seeds via silent transitions only
// (seeds included). Counts newly discovered markings against the budget.
inline MarkingSet silent_closure(const PetriNet& net, MarkingSet seeds,
                                 std::size_t& seen, std::size_t budget) {
  std::deque<Marking> queue(seeds.begin(), seeds.end());
  while (!queue.empty()) {
    Marking m = std::move(queue.front());
    queue.pop_front();
    for (std::size_t t = 0; t < net.transitions().size(); ++t) {
      if (!net.transitions()[t].silent()) continue;
      if (!net.transition_enabled(m, t)) continue;
      Marking next = fire(net, m, t);
      if (seeds.insert(next).second) {
        if (++seen > budget)
          throw replay_budget_error("replay exceeded marking budget of " +
                                    std::to_string(budget));
        queue.push_back(std::move(next));
      }
    }
  }
  return seeds;
}

}  // namespace detail

/// True iff some firing sequence from the initial marking fires labeled
/// transitions matching the trace exactly, with silent transitions
/// interleaved freely, and ends in the final marking (one token in the
/// sink, zero elsewhere). Breadth-first search over markings.
inline bool is_replayable(const PetriNet& net, const Trace& trace,
                          std::size_t budget = kDefaultReplayBudget) {
  std::size_t seen = 1;
  detail::MarkingSet current{net.initial_marking()};
  current = detail::silent_closure(net, std::move(current), seen, budget);

  for (const Event& ev : trace.events) {
    detail::MarkingSet next;
    for (const Marking& m : current) {
      for (std::size_t t = 0; t < net.transitions().size(); ++t) {
        if (net.transitions()[t].label != ev.activity) continue;
        if (!net.transition_enabled(m, t)) continue;
        if (next.insert(fire(net, m, t)).second) {
          if (++seen > budget)
            throw replay_budget_error("replay exceeded marking budget of " +
                                      std::to_string(budget));
        }
      }
    }
    if (next.empty()) return false;
    current = detail::silent_closure(net, std::move(next), seen, budget);
  }

  const Marking target = net.final_marking();
  for (const Marking& m : current)
    if (m == target) return true;
  return false;
}

/// One-length paths: (a, b) such that a directed path leads from a's
/// transition to b's transition through places and silent transitions
/// only. Silent transitions are traversed but contribute no pairs.
inline OlpSet extract_olp(const PetriNet& net) {
  OlpSet olp;
  const auto& transitions = net.transitions();

  // place -> outgoing transitions
  std::vector<std::vector<std::size_t>> place_out(net.place_count());
  for (std::size_t t = 0; t < transitions.size(); ++t)
    for (std::size_t p : transitions[t].pre) place_out[p].push_back(t);

  for (std::size_t a = 0; a < transitions.size(); ++a) {
    if (transitions[a].silent()) continue;
    std::vector<bool> seen_t(transitions.size(), false);
    std::vector<bool> seen_p(net.place_count(), false);
    std::deque<std::size_t> queue;  // transition indices to expand
    queue.push_back(a);
    seen_t[a] = true;
    while (!queue.empty()) {
      const std::size_t t = queue.front();
      queue.pop_front();
      for (std::size_t p : transitions[t].post) {
        if (seen_p[p]) continue;
        seen_p[p] = true;
        for (std::size_t succ : place_out[p]) {
          if (seen_t[succ]) continue;
          seen_t[succ] = true;
          if (transitions[succ].silent()) {
            queue.push_back(succ);
          } else {
            olp.emplace(transitions[a].label, transitions[succ].label);
          }
        }
      }
    }
  }
  return olp;
}

// ---- PNML subset ---------------------------------------------------------

inline void write_pnml(std::ostream& out, const PetriNet& net) {
  namespace pt = boost::property_tree;
  pt::ptree doc;
  pt::ptree& net_node = doc.add_child("pnml.net", pt::ptree());
  net_node.put("<xmlattr>.id", "net0");

  std::vector<std::string> places = net.place_ids();
  std::sort(places.begin(), places.end());
  for (const auto& p : places) {
    pt::ptree node;
    node.put("<xmlattr>.id", p);
    net_node.add_child("place", node);
  }
  std::vector<std::pair<std::string, std::string>> trans;
  for (const auto& t : net.transitions()) trans.emplace_back(t.id, t.label);
  std::sort(trans.begin(), trans.end());
  for (const auto& [id, label] : trans) {
    pt::ptree node;
    node.put("<xmlattr>.id", id);
    if (!label.empty()) node.put("name.text", label);
    net_node.add_child("transition", node);
  }
  auto arcs = net.arcs();
  std::sort(arcs.begin(), arcs.end());
  std::size_t arc_id = 0;
  for (const auto& [from, to] : arcs) {
    pt::ptree node;
    node.put("<xmlattr>.id", "a" + std::to_string(arc_id++));
    node.put("<xmlattr>.source", from);
    node.put("<xmlattr>.target", to);
    net_node.add_child("arc", node);
  }
  pt::write_xml(out, doc, pt::xml_writer_settings<std::string>(' ', 2));
}

namespace detail {

inline void collect_pnml_nodes(const boost::property_tree::ptree& node,
                               std::vector<std::string>& places,
                               std::vector<std::pair<std::string, std::string>>& trans,
                               std::vector<std::pair<std::string, std::string>>& arcs) {
  for (const auto& [tag, child] : node) {
    if (tag == "place") {
      places.push_back(child.get<std::string>("<xmlattr>.id"));
    } else if (tag == "transition") {
      const auto id = child.get<std::string>("<xmlattr>.id");
      auto label = child.get<std::string>("name.text", "");
      if (label == "tau") label.clear();
      trans.emplace_back(id, label);
    } else if (tag == "arc") {
      arcs.emplace_back(child.get<std::string>("<xmlattr>.source"),
                        child.get<std::string>("<xmlattr>.target"));
    } else if (tag != "<xmlattr>") {
      collect_pnml_nodes(child, places, trans, arcs);  // e.g. <page>
    }
  }
}

}  // namespace detail

inline PetriNet read_pnml(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree doc;
  try {
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    throw parse_error(std::string("malformed PNML: ") + e.what());
  }
  const auto pnml = doc.get_child_optional("pnml");
  if (!pnml) throw parse_error("PNML: missing <pnml> root element");
  std::vector<std::string> places;
  std::vector<std::pair<std::string, std::string>> trans;
  std::vector<std::pair<std::string, std::string>> arcs;
  detail::collect_pnml_nodes(*pnml, places, trans, arcs);
  try {
    return PetriNet(places, trans, arcs);
  } catch (const net_error& e) {
    throw parse_error(std::string("invalid PNML net: ") + e.what());
  }
}

inline PetriNet load_pnml(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open PNML file: " + path);
  return read_pnml(in);
}

inline void save_pnml(const std::string& path, const PetriNet& net) {
  std::ofstream out(path);
  if (!out) throw parse_error("cannot open for writing: " + path);
  write_pnml(out, net);
}

}  // namespace driftscan
