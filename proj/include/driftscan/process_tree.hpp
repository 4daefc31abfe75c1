#pragma once

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "driftscan/petri_net.hpp"

namespace driftscan {

struct tree_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class TreeOp {
  leaf,      // labeled activity
  silent,    // tau
  sequence,  // ordered children
  exclusive, // pick one child
  parallel,  // interleave children
  loop,      // children[0] = body, children[1..] = redo parts
};

struct ProcessTree {
  TreeOp op = TreeOp::silent;
  std::string activity;  // only for leaf
  std::vector<ProcessTree> children;

  friend bool operator==(const ProcessTree&, const ProcessTree&) = default;
};

inline ProcessTree leaf(std::string activity) {
  return ProcessTree{TreeOp::leaf, std::move(activity), {}};
}
inline ProcessTree silent() { return ProcessTree{TreeOp::silent, "", {}}; }
inline ProcessTree seq(std::vector<ProcessTree> children) {
  return ProcessTree{TreeOp::sequence, "", std::move(children)};
}
inline ProcessTree exclusive(std::vector<ProcessTree> children) {
  return ProcessTree{TreeOp::exclusive, "", std::move(children)};
}
inline ProcessTree parallel(std::vector<ProcessTree> children) {
  return ProcessTree{TreeOp::parallel, "", std::move(children)};
}
inline ProcessTree loop(std::vector<ProcessTree> children) {
  return ProcessTree{TreeOp::loop, "", std::move(children)};
}

inline void validate_tree(const ProcessTree& tree) {
  switch (tree.op) {
    case TreeOp::leaf:
      if (tree.activity.empty()) throw tree_error("leaf with empty activity");
      if (!tree.children.empty()) throw tree_error("leaf with children");
      break;
    case TreeOp::silent:
      if (!tree.children.empty()) throw tree_error("tau with children");
      break;
    case TreeOp::sequence:
    case TreeOp::exclusive:
    case TreeOp::parallel:
      if (tree.children.size() < 2)
        throw tree_error("operator node needs at least 2 children");
      break;
    case TreeOp::loop:
      if (tree.children.size() < 2)
        throw tree_error("loop needs a body and at least one redo part");
      break;
  }
  for (const auto& child : tree.children) validate_tree(child);
}

// ---- text form: seq(A, and(B, C), D, xor(E, F), G) ------------------------

inline std::string format_tree(const ProcessTree& tree) {
  switch (tree.op) {
    case TreeOp::leaf:
      return tree.activity;
    case TreeOp::silent:
      return "tau";
    default:
      break;
  }
  std::string name;
  switch (tree.op) {
    case TreeOp::sequence: name = "seq"; break;
    case TreeOp::exclusive: name = "xor"; break;
    case TreeOp::parallel: name = "and"; break;
    case TreeOp::loop: name = "loop"; break;
    default: break;
  }
  std::string out = name + "(";
  for (std::size_t i = 0; i < tree.children.size(); ++i) {
    if (i) out += ", ";
    out += format_tree(tree.children[i]);
  }
  out += ")";
  return out;
}

namespace detail {

struct TreeParser {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  std::string token() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && text[pos] != '(' && text[pos] != ')' &&
           text[pos] != ',' &&
           !std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
    if (start == pos) throw tree_error("tree parse: expected token at offset " +
                                       std::to_string(pos));
    return text.substr(start, pos - start);
  }

  ProcessTree parse_node() {
    const std::string tok = token();
    skip_ws();
    if (pos < text.size() && text[pos] == '(') {
      ++pos;
      std::vector<ProcessTree> children;
      skip_ws();
      if (pos < text.size() && text[pos] == ')') {
        ++pos;
      } else {
        while (true) {
          children.push_back(parse_node());
          skip_ws();
          if (pos >= text.size())
            throw tree_error("tree parse: unterminated operator " + tok);
          if (text[pos] == ',') {
            ++pos;
            continue;
          }
          if (text[pos] == ')') {
            ++pos;
            break;
          }
          throw tree_error("tree parse: expected ',' or ')' at offset " +
                           std::to_string(pos));
        }
      }
      TreeOp op;
      if (tok == "seq") op = TreeOp::sequence;
      else if (tok == "xor") op = TreeOp::exclusive;
      else if (tok == "and") op = TreeOp::parallel;
      else if (tok == "loop") op = TreeOp::loop;
      else throw tree_error("tree parse: unknown operator '" + tok + "'");
      return ProcessTree{op, "", std::move(children)};
    }
    if (tok == "tau") return silent();
    return leaf(tok);
  }
};

}  // namespace detail

inline ProcessTree parse_tree(const std::string& text) {
  detail::TreeParser parser{text};
  ProcessTree tree = parser.parse_node();
  parser.skip_ws();
  if (parser.pos != text.size())
    throw tree_error("tree parse: trailing input at offset " +
                     std::to_string(parser.pos));
  validate_tree(tree);
  return tree;
}

// ---- tree paths ("2.0" = child 2, then its child 0; "" = root) ------------

inline std::vector<std::size_t> parse_tree_path(const std::string& path) {
  std::vector<std::size_t> indices;
  if (path.empty()) return indices;
  std::istringstream in(path);
  std::string part;
  while (std::getline(in, part, '.')) {
    try {
      indices.push_back(std::stoul(part));
    } catch (const std::exception&) {
      throw tree_error("invalid tree path: " + path);
    }
  }
  return indices;
}

inline const ProcessTree& subtree_at(const ProcessTree& tree,
                                     const std::vector<std::size_t>& path) {
  const ProcessTree* node = &tree;
  for (std::size_t idx : path) {
    if (idx >= node->children.size())
      throw tree_error("tree path index " + std::to_string(idx) +
                       " out of range");
    node = &node->children[idx];
  }
  return *node;
}

inline ProcessTree& subtree_at(ProcessTree& tree,
                               const std::vector<std::size_t>& path) {
  return const_cast<ProcessTree&>(
      subtree_at(static_cast<const ProcessTree&>(tree), path));
}

// ---- conversion to a Petri net --------------------------------------------

namespace detail {

struct NetBuildContext {
  PetriNet::Builder builder;
  std::size_t next_place = 0;
  std::size_t next_trans = 0;

  std::string new_place() {
    std::string id = "p" + std::to_string(next_place++);
    builder.place(id);
    return id;
  }
  std::string new_transition(const std::string& label) {
    std::string id = "t" + std::to_string(next_trans++);
    builder.transition(id, label);
    return id;
  }
};

// Wires the subtree between the entry and exit places. Only arcs out of
// entry and into exit are added, so loops stay local to their own places.
inline void wire(NetBuildContext& ctx, const ProcessTree& tree,
                 const std::string& entry, const std::string& exit) {
  switch (tree.op) {
    case TreeOp::leaf: {
      const std::string t = ctx.new_transition(tree.activity);
      ctx.builder.arc(entry, t).arc(t, exit);
      break;
    }
    case TreeOp::silent: {
      const std::string t = ctx.new_transition("");
      ctx.builder.arc(entry, t).arc(t, exit);
      break;
    }
    case TreeOp::sequence: {
      std::string current = entry;
      for (std::size_t i = 0; i < tree.children.size(); ++i) {
        const std::string next =
            i + 1 == tree.children.size() ? exit : ctx.new_place();
        wire(ctx, tree.children[i], current, next);
        current = next;
      }
      break;
    }
    case TreeOp::exclusive: {
      for (const auto& child : tree.children) wire(ctx, child, entry, exit);
      break;
    }
    case TreeOp::parallel: {
      const std::string split = ctx.new_transition("");
      const std::string join = ctx.new_transition("");
      ctx.builder.arc(entry, split).arc(join, exit);
      for (const auto& child : tree.children) {
        const std::string in = ctx.new_place();
        const std::string out = ctx.new_place();
        ctx.builder.arc(split, in).arc(out, join);
        wire(ctx, child, in, out);
      }
      break;
    }
    case TreeOp::loop: {
      const std::string enter = ctx.new_transition("");
      const std::string leave = ctx.new_transition("");
      const std::string in = ctx.new_place();
      const std::string out = ctx.new_place();
      ctx.builder.arc(entry, enter).arc(enter, in);
      ctx.builder.arc(out, leave).arc(leave, exit);
      wire(ctx, tree.children[0], in, out);
      for (std::size_t i = 1; i < tree.children.size(); ++i) {
        wire(ctx, tree.children[i], out, in);
      }
      break;
    }
  }
}

}  // namespace detail

inline PetriNet to_net(const ProcessTree& tree) {
  validate_tree(tree);
  detail::NetBuildContext ctx;
  const std::string source = ctx.new_place();
  const std::string sink = ctx.new_place();
  detail::wire(ctx, tree, source, sink);
  return ctx.builder.build();
}

}  // namespace driftscan
