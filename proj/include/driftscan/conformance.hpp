#pragma once

#include <stdexcept>
#include <string>
#include <unordered_map>

#include "driftscan/event_log.hpp"
#include "driftscan/petri_net.hpp"

namespace driftscan {

struct degenerate_model_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Memo of replay verdicts keyed by activity sequence, valid for one net.
/// Sliding windows share all but one trace, so reuse pays off.
struct ReplayCache {
  std::unordered_map<std::string, bool> by_sequence;

  static std::string key(const Trace& trace) {
    std::string k;
    for (const Event& ev : trace.events) {
      k += ev.activity;
      k += '\x1f';
    }
    return k;
  }
};

inline bool cached_replay(const PetriNet& net, const Trace& trace,
                          std::size_t budget, ReplayCache* cache) {
  if (!cache) return is_replayable(net, trace, budget);
  const std::string key = ReplayCache::key(trace);
  auto it = cache->by_sequence.find(key);
  if (it != cache->by_sequence.end()) return it->second;
  const bool ok = is_replayable(net, trace, budget);
  cache->by_sequence.emplace(std::move(key), ok);
  return ok;
}

/// Fraction of window traces fully replayable on the net.
inline double rt_fitness(const SlidingWindow& window, const PetriNet& net,
                         std::size_t budget = kDefaultReplayBudget,
                         ReplayCache* cache = nullptr) {
  std::size_t replayable = 0;
  for (const Trace& trace : window) {
    if (cached_replay(net, trace, budget, cache)) ++replayable;
  }
  return static_cast<double>(replayable) / static_cast<double>(window.size());
}

/// Precision change: 1 - |OLP \ DFR| / |OLP|. A drop means paths of the
/// model stopped appearing in the observed window.
inline double pc_precision(const SlidingWindow& window, const OlpSet& olp) {
  if (olp.empty())
    throw degenerate_model_error("model has no one-length paths");
  const DfrSet dfr = extract_dfr(window);
  std::size_t missing = 0;
  for (const ActivityPair& pair : olp) {
    if (!dfr.count(pair)) ++missing;
  }
  return 1.0 - static_cast<double>(missing) / static_cast<double>(olp.size());
}

inline double pc_precision(const SlidingWindow& window, const PetriNet& net) {
  return pc_precision(window, extract_olp(net));
}

}  // namespace driftscan
