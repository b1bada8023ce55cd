#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "boltdis/pddl.hpp"

namespace boltdis::sexpr {

struct Node {
  bool is_list = false;
  std::string symbol;
  std::vector<Node> items;
  SourcePos pos;
  /// List opened directly after a symbol, as in `have(coarse_pose)`.
  bool adjacent = false;

  bool is_symbol() const { return !is_list; }
  bool is_symbol(std::string_view lowered) const;
  /// Lowercased head symbol of a list, or empty.
  std::string head() const;
};

std::string lowercase(std::string_view text);

/// Reads every top-level expression. In lenient mode, lists are closed
/// automatically at block boundaries (`(:action`, `(:init`, ...), at action
/// section keywords (`:pre`, `:effect`, ...) and at end of input; stray
/// closing parentheses are dropped.
std::vector<Node> read_all(std::string_view text, bool lenient);

std::string describe(const Node& node);

}  // namespace boltdis::sexpr
