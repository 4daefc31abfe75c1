#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "driftscan/event_log.hpp"
#include "driftscan/petri_net.hpp"
#include "driftscan/process_tree.hpp"

namespace driftscan {

struct Dfg {
  std::set<std::string> activities;
  std::map<ActivityPair, int> edges;
  std::set<std::string> start_activities;
  std::set<std::string> end_activities;

  bool has_edge(const std::string& a, const std::string& b) const {
    return edges.count({a, b}) > 0;
  }
};

namespace detail {

using Sequences = std::vector<std::vector<std::string>>;

inline Dfg build_dfg_from_sequences(const Sequences& seqs) {
  Dfg dfg;
  for (const auto& s : seqs) {
    for (const auto& a : s) dfg.activities.insert(a);
    if (!s.empty()) {
      dfg.start_activities.insert(s.front());
      dfg.end_activities.insert(s.back());
    }
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      dfg.edges[{s[i], s[i + 1]}] += 1;
    }
  }
  return dfg;
}

using Group = std::set<std::string>;

// Undirected connected components over the given activities, connecting a
// and b when connect(a, b) holds.
template <typename Connect>
std::vector<Group> components(const std::set<std::string>& activities,
                              Connect connect) {
  std::vector<Group> comps;
  std::set<std::string> unvisited = activities;
  while (!unvisited.empty()) {
    Group comp;
    std::vector<std::string> stack{*unvisited.begin()};
    unvisited.erase(unvisited.begin());
    while (!stack.empty()) {
      std::string a = stack.back();
      stack.pop_back();
      comp.insert(a);
      for (auto it = unvisited.begin(); it != unvisited.end();) {
        if (connect(a, *it)) {
          stack.push_back(*it);
          it = unvisited.erase(it);
        } else {
          ++it;
        }
      }
    }
    comps.push_back(std::move(comp));
  }
  return comps;
}

// ---- exclusive-choice cut ----

inline std::vector<Group> xor_cut(const Dfg& dfg) {
  auto comps = components(dfg.activities, [&](const std::string& a,
                                              const std::string& b) {
    return dfg.has_edge(a, b) || dfg.has_edge(b, a);
  });
  if (comps.size() < 2) return {};
  return comps;
}

// ---- sequence cut ----

inline std::vector<Group> sequence_cut(const Dfg& dfg) {
  const std::vector<std::string> acts(dfg.activities.begin(),
                                      dfg.activities.end());
  const std::size_t n = acts.size();
  if (n < 2) return {};
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[acts[i]] = i;

  // transitive reachability over activities
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (const auto& [edge, count] : dfg.edges) {
    (void)count;
    reach[index.at(edge.first)][index.at(edge.second)] = true;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = true;

  // merge activities that are mutually reachable or mutually unreachable;
  // repeat on group reachability until stable
  std::vector<std::size_t> group(n);
  for (std::size_t i = 0; i < n; ++i) group[i] = i;
  auto find = [&](std::size_t i) {
    while (group[i] != i) i = group[i] = group[group[i]];
    return i;
  };
  auto unite = [&](std::size_t a, std::size_t b) { group[find(a)] = find(b); };

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (find(i) == find(j)) continue;
        bool fwd = false, bwd = false;
        for (std::size_t a = 0; a < n; ++a) {
          if (find(a) != find(i)) continue;
          for (std::size_t b = 0; b < n; ++b) {
            if (find(b) != find(j)) continue;
            fwd = fwd || reach[a][b];
            bwd = bwd || reach[b][a];
          }
        }
        if (fwd == bwd) {  // mutually reachable or mutually unreachable
          unite(i, j);
          changed = true;
        }
      }
    }
  }

  std::map<std::size_t, Group> by_root;
  for (std::size_t i = 0; i < n; ++i) by_root[find(i)].insert(acts[i]);
  if (by_root.size() < 2) return {};

  std::vector<Group> groups;
  for (auto& [root, g] : by_root) groups.push_back(std::move(g));

  // total order: group A precedes B iff some member of A reaches B
  std::sort(groups.begin(), groups.end(), [&](const Group& a, const Group& b) {
    for (const auto& x : a)
      for (const auto& y : b)
        if (reach[index.at(x)][index.at(y)]) return true;
    return false;
  });
  return groups;
}

// ---- parallel cut ----

inline std::vector<Group> parallel_cut(const Dfg& dfg) {
  auto comps = components(dfg.activities, [&](const std::string& a,
                                              const std::string& b) {
    return !(dfg.has_edge(a, b) && dfg.has_edge(b, a));
  });
  if (comps.size() < 2) return {};
  for (const auto& comp : comps) {
    bool has_start = false, has_end = false;
    for (const auto& a : comp) {
      has_start = has_start || dfg.start_activities.count(a) > 0;
      has_end = has_end || dfg.end_activities.count(a) > 0;
    }
    if (!has_start || !has_end) return {};
  }
  return comps;
}

// ---- loop cut ----

inline std::vector<Group> loop_cut(const Dfg& dfg) {
  Group body;
  for (const auto& a : dfg.start_activities) body.insert(a);
  for (const auto& a : dfg.end_activities) body.insert(a);
  if (body.size() >= dfg.activities.size()) return {};

  std::set<std::string> rest;
  for (const auto& a : dfg.activities)
    if (!body.count(a)) rest.insert(a);

  auto comps = components(rest, [&](const std::string& a, const std::string& b) {
    return dfg.has_edge(a, b) || dfg.has_edge(b, a);
  });

  // A component is a redo part when it is entered only from end activities
  // and leaves only into start activities. Others fold into the body; folding
  // can invalidate remaining components, so iterate.
  std::vector<Group> redos;
  bool changed = true;
  while (changed) {
    changed = false;
    redos.clear();
    for (auto it = comps.begin(); it != comps.end();) {
      const Group& comp = *it;
      bool valid = true;
      bool entered = false, leaves = false;
      for (const auto& [edge, count] : dfg.edges) {
        (void)count;
        const bool from_in = comp.count(edge.first) > 0;
        const bool to_in = comp.count(edge.second) > 0;
        if (!from_in && to_in && !rest.count(edge.first)) {
          entered = true;
          if (!dfg.end_activities.count(edge.first)) valid = false;
        }
        if (from_in && !to_in && !rest.count(edge.second)) {
          leaves = true;
          if (!dfg.start_activities.count(edge.second)) valid = false;
        }
      }
      if (valid && entered && leaves) {
        redos.push_back(comp);
        ++it;
      } else {
        for (const auto& a : comp) {
          body.insert(a);
          rest.erase(a);
        }
        it = comps.erase(it);
        changed = true;
      }
    }
  }
  if (redos.empty()) return {};

  std::vector<Group> parts{body};
  for (auto& r : redos) parts.push_back(std::move(r));
  return parts;
}

// ---- log splitting ----

inline std::size_t group_of(const std::vector<Group>& groups,
                            const std::string& activity) {
  for (std::size_t g = 0; g < groups.size(); ++g)
    if (groups[g].count(activity)) return g;
  return groups.size();
}

inline std::vector<Sequences> split_by_projection(const Sequences& seqs,
                                                  const std::vector<Group>& groups) {
  std::vector<Sequences> parts(groups.size());
  for (const auto& s : seqs) {
    std::vector<std::vector<std::string>> projected(groups.size());
    for (const auto& a : s) projected[group_of(groups, a)].push_back(a);
    for (std::size_t g = 0; g < groups.size(); ++g)
      parts[g].push_back(std::move(projected[g]));
  }
  return parts;
}

inline std::vector<Sequences> split_xor(const Sequences& seqs,
                                        const std::vector<Group>& groups) {
  std::vector<Sequences> parts(groups.size());
  for (const auto& s : seqs) {
    if (s.empty()) continue;  // empty traces handled before cuts
    parts[group_of(groups, s.front())].push_back(s);
  }
  return parts;
}

// Splits each trace into alternating body/redo instances. parts[0] is the
// body; a body instance also ends at an end->start boundary inside the body.
inline std::vector<Sequences> split_loop(const Sequences& seqs,
                                         const std::vector<Group>& parts,
                                         const Dfg& dfg) {
  std::vector<Sequences> result(parts.size());
  for (const auto& s : seqs) {
    std::size_t current = 0;
    std::vector<std::string> instance;
    auto flush = [&](std::size_t part) {
      result[part].push_back(std::move(instance));
      instance.clear();
    };
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::size_t g = group_of(parts, s[i]);
      if (i == 0) {
        current = g;
      } else if (g != current) {
        flush(current);
        current = g;
      } else if (g == 0 && dfg.end_activities.count(s[i - 1]) &&
                 dfg.start_activities.count(s[i])) {
        flush(0);  // unmediated loop back inside the body
      }
      instance.push_back(s[i]);
    }
    if (!s.empty()) flush(current);
  }
  return result;
}

// ---- canonical form ----

inline std::string min_label(const ProcessTree& tree) {
  if (tree.op == TreeOp::leaf) return tree.activity;
  if (tree.op == TreeOp::silent) return "";
  std::string best;
  bool first = true;
  for (const auto& child : tree.children) {
    std::string m = min_label(child);
    if (first || m < best) {
      best = std::move(m);
      first = false;
    }
  }
  return best;
}

inline ProcessTree canonicalize(ProcessTree tree) {
  for (auto& child : tree.children) child = canonicalize(std::move(child));

  // flatten nested nodes of the same associative operator
  if (tree.op == TreeOp::sequence || tree.op == TreeOp::exclusive ||
      tree.op == TreeOp::parallel) {
    std::vector<ProcessTree> flat;
    for (auto& child : tree.children) {
      if (child.op == tree.op) {
        for (auto& grand : child.children) flat.push_back(std::move(grand));
      } else {
        flat.push_back(std::move(child));
      }
    }
    tree.children = std::move(flat);
  }

  if (tree.op == TreeOp::exclusive || tree.op == TreeOp::parallel) {
    std::stable_sort(tree.children.begin(), tree.children.end(),
                     [](const ProcessTree& a, const ProcessTree& b) {
                       const std::string ma = min_label(a), mb = min_label(b);
                       if (ma != mb) return ma < mb;
                       return format_tree(a) < format_tree(b);
                     });
  }
  return tree;
}

// ---- the recursion ----

inline ProcessTree im_discover(const Sequences& seqs);

inline ProcessTree im_node(TreeOp op, const std::vector<Sequences>& parts) {
  std::vector<ProcessTree> children;
  children.reserve(parts.size());
  for (const auto& part : parts) children.push_back(im_discover(part));
  return ProcessTree{op, "", std::move(children)};
}

inline ProcessTree im_discover(const Sequences& seqs) {
  std::set<std::string> activities;
  bool has_empty = false;
  bool all_single = true;
  for (const auto& s : seqs) {
    for (const auto& a : s) activities.insert(a);
    if (s.empty()) has_empty = true;
    if (s.size() != 1) all_single = false;
  }

  if (activities.empty()) return silent();

  if (has_empty) {
    Sequences non_empty;
    for (const auto& s : seqs)
      if (!s.empty()) non_empty.push_back(s);
    return exclusive({silent(), im_discover(non_empty)});
  }

  if (activities.size() == 1) {
    const std::string& a = *activities.begin();
    if (all_single) return leaf(a);
    return loop({leaf(a), silent()});
  }

  const Dfg dfg = build_dfg_from_sequences(seqs);

  if (auto groups = xor_cut(dfg); !groups.empty())
    return im_node(TreeOp::exclusive, split_xor(seqs, groups));
  if (auto groups = sequence_cut(dfg); !groups.empty())
    return im_node(TreeOp::sequence, split_by_projection(seqs, groups));
  if (auto groups = parallel_cut(dfg); !groups.empty())
    return im_node(TreeOp::parallel, split_by_projection(seqs, groups));
  if (auto groups = loop_cut(dfg); !groups.empty()) {
    auto parts = split_loop(seqs, groups, dfg);
    std::vector<ProcessTree> children;
    children.reserve(parts.size());
    for (const auto& part : parts) children.push_back(im_discover(part));
    return ProcessTree{TreeOp::loop, "", std::move(children)};
  }

  // fall through: strict tau loop — split at end->start boundaries
  {
    Sequences segments;
    bool split_any = false;
    for (const auto& s : seqs) {
      std::vector<std::string> segment;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (i > 0 && dfg.end_activities.count(s[i - 1]) &&
            dfg.start_activities.count(s[i])) {
          segments.push_back(std::move(segment));
          segment.clear();
          split_any = true;
        }
        segment.push_back(s[i]);
      }
      segments.push_back(std::move(segment));
    }
    if (split_any) return loop({im_discover(segments), silent()});
  }

  // fall through: flower model
  std::vector<ProcessTree> redos;
  for (const auto& a : activities) redos.push_back(leaf(a));
  std::vector<ProcessTree> children{silent()};
  for (auto& r : redos) children.push_back(std::move(r));
  return ProcessTree{TreeOp::loop, "", std::move(children)};
}

inline Sequences window_sequences(const SlidingWindow& window) {
  Sequences seqs;
  seqs.reserve(window.size());
  for (const Trace& trace : window) {
    std::vector<std::string> s;
    s.reserve(trace.events.size());
    for (const Event& ev : trace.events) s.push_back(ev.activity);
    seqs.push_back(std::move(s));
  }
  return seqs;
}

}  // namespace detail

inline Dfg build_dfg(const SlidingWindow& window) {
  return detail::build_dfg_from_sequences(detail::window_sequences(window));
}

/// Basic inductive-miner discovery: recursive DFG cuts with a flower-model
/// fall-through, so every window trace replays on the result.
inline ProcessTree discover_tree(const SlidingWindow& window) {
  return detail::canonicalize(
      detail::im_discover(detail::window_sequences(window)));
}

inline PetriNet discover(const SlidingWindow& window) {
  return to_net(discover_tree(window));
}

}  // namespace driftscan
