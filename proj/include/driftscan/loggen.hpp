#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "driftscan/event_log.hpp"
#include "driftscan/evaluation.hpp"
#include "driftscan/process_tree.hpp"

namespace driftscan {

struct generator_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// ---- play-out ---------------------------------------------------------------

namespace detail {

inline void sample_into(const ProcessTree& tree, std::mt19937_64& rng,
                        double loop_continue_prob,
                        std::vector<std::string>& out) {
  switch (tree.op) {
    case TreeOp::leaf:
      out.push_back(tree.activity);
      break;
    case TreeOp::silent:
      break;
    case TreeOp::sequence:
      for (const auto& child : tree.children)
        sample_into(child, rng, loop_continue_prob, out);
      break;
    case TreeOp::exclusive: {
      std::uniform_int_distribution<std::size_t> pick(0, tree.children.size() - 1);
      sample_into(tree.children[pick(rng)], rng, loop_continue_prob, out);
      break;
    }
    case TreeOp::parallel: {
      std::vector<std::vector<std::string>> branches;
      for (const auto& child : tree.children) {
        std::vector<std::string> branch;
        sample_into(child, rng, loop_continue_prob, branch);
        branches.push_back(std::move(branch));
      }
      // uniform random interleaving: draw the next event from branch i with
      // probability proportional to its remaining length
      std::vector<std::size_t> pos(branches.size(), 0);
      std::size_t remaining = 0;
      for (const auto& b : branches) remaining += b.size();
      while (remaining > 0) {
        std::uniform_int_distribution<std::size_t> pick(1, remaining);
        std::size_t k = pick(rng);
        for (std::size_t i = 0; i < branches.size(); ++i) {
          const std::size_t left = branches[i].size() - pos[i];
          if (k <= left) {
            out.push_back(branches[i][pos[i]++]);
            break;
          }
          k -= left;
        }
        --remaining;
      }
      break;
    }
    case TreeOp::loop: {
      sample_into(tree.children[0], rng, loop_continue_prob, out);
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      while (coin(rng) < loop_continue_prob) {
        std::uniform_int_distribution<std::size_t> pick(1, tree.children.size() - 1);
        sample_into(tree.children[pick(rng)], rng, loop_continue_prob, out);
        sample_into(tree.children[0], rng, loop_continue_prob, out);
      }
      break;
    }
  }
}

}  // namespace detail

/// Sample `count` traces from the tree. Sequence = concatenation, choice =
/// uniform pick, parallel = uniform interleaving, loop = geometric redo.
/// Timestamps are a global event counter; deterministic for a fixed seed.
inline EventLog play_out(const ProcessTree& tree, std::size_t count,
                         std::uint64_t seed, double loop_continue_prob = 0.3) {
  if (count < 1) throw generator_error("play_out: count must be >= 1");
  if (loop_continue_prob <= 0.0 || loop_continue_prob >= 1.0)
    throw generator_error("play_out: loop_continue_prob must be in (0, 1)");
  validate_tree(tree);

  std::mt19937_64 rng(seed);
  EventLog log;
  std::int64_t clock = 0;
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<std::string> activities;
    detail::sample_into(tree, rng, loop_continue_prob, activities);
    Trace trace;
    trace.id = "t" + std::to_string(i);
    for (auto& a : activities) {
      trace.events.push_back(Event{std::move(a), trace.id, clock++});
    }
    log.traces.push_back(std::move(trace));
  }
  return log;
}

// ---- change patterns ----------------------------------------------------------

/// Selector syntax: a tree path to one fragment ("3", "4.1", "" = root), or
/// "PATH@i,j" naming two adjacent children i, j of the sequence node at PATH
/// for the two-fragment patterns (pl, cf, sw).
struct PatternSelector {
  std::vector<std::size_t> path;
  bool has_pair = false;
  std::size_t first = 0;
  std::size_t second = 0;

  static PatternSelector parse(const std::string& text) {
    PatternSelector sel;
    const auto at = text.find('@');
    sel.path = parse_tree_path(at == std::string::npos ? text : text.substr(0, at));
    if (at != std::string::npos) {
      const auto rest = text.substr(at + 1);
      const auto comma = rest.find(',');
      if (comma == std::string::npos)
        throw generator_error("selector pair must be PATH@i,j: " + text);
      try {
        sel.first = std::stoul(rest.substr(0, comma));
        sel.second = std::stoul(rest.substr(comma + 1));
      } catch (const std::exception&) {
        throw generator_error("selector pair must be PATH@i,j: " + text);
      }
      sel.has_pair = true;
    }
    return sel;
  }
};

inline const std::vector<std::string>& supported_patterns() {
  static const std::vector<std::string> codes{"re", "cb", "lp", "pl",
                                              "cf", "sw", "rp", "cp"};
  return codes;
}

namespace detail {

inline bool is_silent_leaf(const ProcessTree& t) { return t.op == TreeOp::silent; }

// xor(F, tau) -> F and back
inline ProcessTree toggle_skippable(const ProcessTree& fragment) {
  if (fragment.op == TreeOp::exclusive && fragment.children.size() == 2) {
    if (is_silent_leaf(fragment.children[0])) return fragment.children[1];
    if (is_silent_leaf(fragment.children[1])) return fragment.children[0];
  }
  return exclusive({fragment, silent()});
}

// loop(F, tau) -> F and back
inline ProcessTree toggle_loopable(const ProcessTree& fragment) {
  if (fragment.op == TreeOp::loop && fragment.children.size() == 2 &&
      is_silent_leaf(fragment.children[1])) {
    return fragment.children[0];
  }
  return loop({fragment, silent()});
}

inline void require_sequence_pair(const ProcessTree& node,
                                  const PatternSelector& sel,
                                  const std::string& pattern) {
  if (!sel.has_pair)
    throw generator_error(pattern + " needs a PATH@i,j selector");
  if (node.op != TreeOp::sequence)
    throw generator_error(pattern + " selector must name a sequence node");
  if (sel.second != sel.first + 1 || sel.second >= node.children.size())
    throw generator_error(pattern + " needs two adjacent children i, i+1");
}

// seq(..., Fi, Fj, ...) -> seq(..., op(Fi, Fj), ...)
inline void toggle_pair_operator(ProcessTree& node, const PatternSelector& sel,
                                 TreeOp op, const std::string& pattern) {
  require_sequence_pair(node, sel, pattern);
  ProcessTree combined{op, "", {std::move(node.children[sel.first]),
                                std::move(node.children[sel.second])}};
  node.children.erase(node.children.begin() +
                      static_cast<std::ptrdiff_t>(sel.second));
  node.children[sel.first] = std::move(combined);
  if (node.children.size() == 1) {
    ProcessTree only = std::move(node.children[0]);
    node = std::move(only);
  }
}

}  // namespace detail

/// Applies one simple change pattern, returning the modified tree:
///   re  remove the fragment (or insert `replacement` after the path)
///   rp  substitute the fragment with `replacement`
///   sw  swap two adjacent sequence children (PATH@i,j)
///   cp  duplicate the fragment right after itself in the parent sequence
///   cb  toggle the fragment skippable / non-skippable
///   lp  toggle the fragment loopable / non-loopable
///   pl  make two sequence children parallel (PATH@i,j), or a parallel
///       node back into its children (plain PATH)
///   cf  same as pl with exclusive choice
inline ProcessTree apply_pattern(
    const ProcessTree& tree, const std::string& pattern,
    const std::string& selector,
    const std::optional<ProcessTree>& replacement = std::nullopt) {
  validate_tree(tree);
  const PatternSelector sel = PatternSelector::parse(selector);
  ProcessTree result = tree;

  auto parent_sequence_of = [&](const std::vector<std::size_t>& path)
      -> std::pair<ProcessTree*, std::size_t> {
    if (path.empty())
      throw generator_error(pattern + ": selector must not be the root");
    std::vector<std::size_t> parent_path(path.begin(), path.end() - 1);
    ProcessTree& parent = subtree_at(result, parent_path);
    if (parent.op != TreeOp::sequence)
      throw generator_error(pattern + ": fragment's parent must be a sequence");
    return {&parent, path.back()};
  };

  if (pattern == "cb" || pattern == "lp") {
    ProcessTree& node = subtree_at(result, sel.path);
    node = pattern == "cb" ? detail::toggle_skippable(node)
                           : detail::toggle_loopable(node);
  } else if (pattern == "pl" || pattern == "cf") {
    const TreeOp op = pattern == "pl" ? TreeOp::parallel : TreeOp::exclusive;
    if (sel.has_pair) {
      ProcessTree& node = subtree_at(result, sel.path);
      detail::toggle_pair_operator(node, sel, op, pattern);
    } else {
      // reverse: inline the combined node back into the parent sequence
      auto [parent, idx] = parent_sequence_of(sel.path);
      ProcessTree combined = std::move(parent->children[idx]);
      if (combined.op != op || combined.children.size() != 2)
        throw generator_error(pattern +
                              ": reverse selector must name a binary " +
                              (pattern == "pl" ? std::string("parallel")
                                               : std::string("choice")) +
                              " node");
      parent->children[idx] = std::move(combined.children[0]);
      parent->children.insert(
          parent->children.begin() + static_cast<std::ptrdiff_t>(idx) + 1,
          std::move(combined.children[1]));
    }
  } else if (pattern == "sw") {
    if (!sel.has_pair) throw generator_error("sw needs a PATH@i,j selector");
    ProcessTree& node = subtree_at(result, sel.path);
    detail::require_sequence_pair(node, sel, "sw");
    std::swap(node.children[sel.first], node.children[sel.second]);
  } else if (pattern == "re") {
    if (replacement) {
      auto [parent, idx] = parent_sequence_of(sel.path);
      parent->children.insert(
          parent->children.begin() + static_cast<std::ptrdiff_t>(idx) + 1,
          *replacement);
    } else {
      auto [parent, idx] = parent_sequence_of(sel.path);
      if (parent->children.size() <= 2)
        throw generator_error("re: cannot delete from a binary sequence");
      parent->children.erase(parent->children.begin() +
                             static_cast<std::ptrdiff_t>(idx));
    }
  } else if (pattern == "rp") {
    if (!replacement)
      throw generator_error("rp needs a replacement fragment");
    ProcessTree& node = subtree_at(result, sel.path);
    node = *replacement;
  } else if (pattern == "cp") {
    auto [parent, idx] = parent_sequence_of(sel.path);
    ProcessTree copy = parent->children[idx];
    parent->children.insert(
        parent->children.begin() + static_cast<std::ptrdiff_t>(idx) + 1,
        std::move(copy));
  } else {
    std::string codes;
    for (const auto& c : supported_patterns()) {
      if (!codes.empty()) codes += ", ";
      codes += c;
    }
    throw generator_error("unsupported pattern '" + pattern +
                          "'; supported: " + codes);
  }

  validate_tree(result);
  return result;
}

// ---- splicing ----------------------------------------------------------------

struct LabeledCorpusEntry {
  EventLog log;
  GroundTruth truth;
  nlohmann::json provenance;
};

/// Alternate fixed-size segments base/variant/base/... and renumber traces.
/// True change indices sit at every segment boundary.
inline LabeledCorpusEntry splice(const EventLog& base_log,
                                 const EventLog& variant_log,
                                 std::size_t segment) {
  if (segment == 0) throw generator_error("splice: segment must be >= 1");
  const std::size_t total = base_log.size() + variant_log.size();
  if (total % segment != 0 || total / segment < 2)
    throw generator_error("splice: logs must fill at least 2 whole segments");
  const std::size_t segments = total / segment;
  const std::size_t need_base = (segments + 1) / 2 * segment;
  const std::size_t need_variant = segments / 2 * segment;
  if (base_log.size() < need_base || variant_log.size() < need_variant)
    throw generator_error("splice: need " + std::to_string(need_base) +
                          " base and " + std::to_string(need_variant) +
                          " variant traces");

  LabeledCorpusEntry entry;
  std::size_t bi = 0, vi = 0;
  std::int64_t clock = 0;
  for (std::size_t s = 0; s < segments; ++s) {
    const EventLog& src = (s % 2 == 0) ? base_log : variant_log;
    std::size_t& cursor = (s % 2 == 0) ? bi : vi;
    for (std::size_t k = 0; k < segment; ++k) {
      Trace trace = src.traces[cursor++];
      trace.id = "t" + std::to_string(entry.log.size());
      for (Event& ev : trace.events) {
        ev.case_id = trace.id;
        ev.timestamp_ms = clock++;
      }
      entry.log.traces.push_back(std::move(trace));
    }
    if (s + 1 < segments) entry.truth.changes.push_back((s + 1) * segment);
  }
  return entry;
}

// ---- bundled base model --------------------------------------------------------

/// Loan-application process: request entry, a rework loop, a parallel
/// check, and a two-level decision cascade. 19 activities A..S.
inline ProcessTree loan_model() {
  return seq({
      leaf("A"),
      loop({leaf("B"), seq({leaf("C"), leaf("D")})}),
      parallel({seq({leaf("E"), leaf("F")}), leaf("G")}),
      leaf("H"),
      exclusive({
          seq({leaf("I"), leaf("K")}),
          seq({leaf("J"), leaf("L"), exclusive({leaf("M"), leaf("N")}),
               leaf("O"),
               exclusive({seq({leaf("P"), leaf("R")}),
                          seq({leaf("Q"), leaf("S")})})}),
      }),
  });
}

/// Default fragment per pattern, all around the mandatory hand-off H
/// (index 3 of the root sequence) so every trace is affected.
inline std::string default_selector(const std::string& pattern) {
  if (pattern == "re" || pattern == "rp" || pattern == "cp" ||
      pattern == "cb" || pattern == "lp")
    return "3";
  if (pattern == "sw") return "@2,3";
  if (pattern == "pl" || pattern == "cf") return "@3,4";
  throw generator_error("no default selector for pattern '" + pattern + "'");
}

inline std::optional<ProcessTree> default_replacement(const std::string& pattern) {
  if (pattern == "rp") return leaf("Z");
  return std::nullopt;
}

// ---- corpus generation ----------------------------------------------------------

struct GeneratorConfig {
  ProcessTree base;
  std::string pattern;
  std::string selector;
  std::size_t total_traces = 2500;
  std::size_t drift_period = 250;
  std::uint64_t seed = 42;
  double loop_continue_prob = 0.3;
};

inline LabeledCorpusEntry generate_corpus_entry(const GeneratorConfig& config) {
  if (config.drift_period == 0 ||
      config.total_traces % config.drift_period != 0 ||
      config.total_traces / config.drift_period < 2)
    throw generator_error(
        "drift period must divide the total trace count into >= 2 segments");

  const std::string selector = config.selector.empty()
                                   ? default_selector(config.pattern)
                                   : config.selector;
  const ProcessTree variant = apply_pattern(config.base, config.pattern, selector,
                                            default_replacement(config.pattern));

  const std::size_t segments = config.total_traces / config.drift_period;
  const std::size_t base_count = (segments + 1) / 2 * config.drift_period;
  const std::size_t variant_count = segments / 2 * config.drift_period;

  const EventLog base_log =
      play_out(config.base, base_count, config.seed, config.loop_continue_prob);
  const EventLog variant_log = play_out(variant, variant_count, config.seed + 1,
                                        config.loop_continue_prob);

  LabeledCorpusEntry entry = splice(base_log, variant_log, config.drift_period);
  entry.truth.epsilon = config.total_traces / 20;  // 5% of log size
  entry.provenance = nlohmann::json{
      {"base_model", format_tree(config.base)},
      {"variant_model", format_tree(variant)},
      {"pattern", config.pattern},
      {"selector", selector},
      {"seed", config.seed},
      {"total_traces", config.total_traces},
      {"drift_period", config.drift_period},
      {"loop_continue_prob", config.loop_continue_prob}};
  return entry;
}

}  // namespace driftscan
