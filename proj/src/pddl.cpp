#include "boltdis/pddl.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "sexpr.hpp"

namespace boltdis {

using sexpr::lowercase;
using sexpr::Node;

std::string to_string(const Atom& atom) {
  std::string out = "(" + atom.predicate;
  for (const auto& arg : atom.args) out += " " + arg;
  return out + ")";
}

std::string to_string(const Literal& literal) {
  return literal.negated ? "(not " + to_string(literal.atom) + ")"
                         : to_string(literal.atom);
}

std::ostream& operator<<(std::ostream& os, const Atom& atom) {
  return os << to_string(atom);
}

std::ostream& operator<<(std::ostream& os, const Literal& literal) {
  return os << to_string(literal);
}

bool is_variable(std::string_view identifier) {
  return !identifier.empty() && identifier.front() == '?';
}

const PredicateInfo* Domain::find_predicate(std::string_view name) const {
  const std::string key = lowercase(name);
  auto it = std::find_if(predicates.begin(), predicates.end(),
                         [&](const PredicateInfo& p) { return p.name == key; });
  return it == predicates.end() ? nullptr : &*it;
}

const ActionSchema* Domain::find_action(std::string_view name) const {
  const std::string key = lowercase(name);
  auto it = std::find_if(actions.begin(), actions.end(), [&](const ActionSchema& a) {
    return lowercase(a.name) == key;
  });
  return it == actions.end() ? nullptr : &*it;
}

bool Domain::is_neural(std::string_view predicate) const {
  const PredicateInfo* info = find_predicate(predicate);
  return info != nullptr && info->kind == PredicateKind::kNeural;
}

std::vector<std::string> Domain::objects() const {
  std::vector<std::string> out;
  auto add = [&](const std::string& name) {
    if (!is_variable(name) && std::find(out.begin(), out.end(), name) == out.end()) {
      out.push_back(name);
    }
  };
  for (const auto& c : constants) add(c);
  for (const auto& action : actions) {
    for (const auto& p : action.params) add(p);
  }
  return out;
}

SyntaxError::SyntaxError(SourcePos pos, std::string expected, const std::string& found)
    : PddlError("syntax error at line " + std::to_string(pos.line) + ", column " +
                std::to_string(pos.column) + ": expected " + expected + ", found " +
                found),
      pos_(pos),
      expected_(std::move(expected)) {}

namespace {

[[noreturn]] void fail(const Node& at, const std::string& expected) {
  throw SyntaxError(at.pos, expected, sexpr::describe(at));
}

std::string identifier(const Node& node, const std::string& what) {
  if (node.is_list || node.symbol.empty() || node.symbol.front() == ':') fail(node, what);
  return node.symbol;
}

std::vector<std::string> symbol_list(const Node& list, const std::string& what) {
  if (!list.is_list) fail(list, "'(' starting " + what);
  std::vector<std::string> out;
  for (const auto& item : list.items) out.push_back(lowercase(identifier(item, what)));
  return out;
}

void add_unique(std::vector<Literal>& out, Literal literal) {
  if (std::find(out.begin(), out.end(), literal) == out.end()) {
    out.push_back(std::move(literal));
  }
}

class FormulaReader {
 public:
  // Sequence context: `have(coarse_pose) (cramped sensor) not(...)`.
  void items(const std::vector<Node>& nodes, std::size_t begin,
             std::vector<Literal>& out) const {
    std::size_t i = begin;
    while (i < nodes.size()) item(nodes, i, out);
  }

  void item(const std::vector<Node>& nodes, std::size_t& i,
            std::vector<Literal>& out) const {
    const Node& node = nodes[i];
    if (node.is_list) {
      list(node, out);
      ++i;
      return;
    }
    const std::string word = lowercase(node.symbol);
    if (word == "and") fail(node, "'(' before 'and'");
    if (word == "not") {
      ++i;
      if (i >= nodes.size()) fail(node, "formula after 'not'");
      std::vector<Literal> inner;
      item(nodes, i, inner);
      out.push_back(negate_single(inner, node));
      return;
    }
    Atom atom{lowercase(identifier(node, "predicate name")), {}};
    ++i;
    if (i < nodes.size() && nodes[i].is_list && nodes[i].adjacent) {
      atom.args = symbol_list(nodes[i], "argument");
      ++i;
    }
    add_unique(out, Literal{std::move(atom), false});
  }

  void list(const Node& node, std::vector<Literal>& out) const {
    if (node.items.empty()) return;  // `()` is the empty conjunction
    const Node& head = node.items.front();
    if (head.is_list) fail(head, "predicate name, 'and' or 'not'");
    const std::string word = lowercase(head.symbol);
    if (word == "and") {
      items(node.items, 1, out);
      return;
    }
    if (word == "not") {
      std::vector<Literal> inner;
      items(node.items, 1, inner);
      out.push_back(negate_single(inner, head));
      return;
    }
    Atom atom{lowercase(identifier(head, "predicate name")), {}};
    if (node.items.size() == 2 && node.items[1].is_list && node.items[1].adjacent) {
      atom.args = symbol_list(node.items[1], "argument");
    } else {
      for (std::size_t k = 1; k < node.items.size(); ++k) {
        atom.args.push_back(lowercase(identifier(node.items[k], "argument")));
      }
    }
    add_unique(out, Literal{std::move(atom), false});
  }

 private:
  static Literal negate_single(const std::vector<Literal>& inner, const Node& at) {
    if (inner.size() != 1 || inner.front().negated) {
      fail(at, "exactly one positive atom inside 'not'");
    }
    return inner.front().negation();
  }
};

// Reads `keyword value` pairs following an `(:action Name` head. The value
// of a formula section may be a parenthesized formula or a functional atom
// such as `have(coarse_pose)`.
ActionSchema read_action(const Node& block) {
  if (block.items.size() < 2) fail(block, "action name after ':action'");
  ActionSchema action;
  action.name = identifier(block.items[1], "action name");
  bool seen_params = false;
  bool seen_pre = false;
  bool seen_eff = false;
  std::size_t i = 2;
  while (i < block.items.size()) {
    const Node& key = block.items[i];
    if (key.is_list) fail(key, "':parameters', ':precondition' or ':effect'");
    const std::string word = lowercase(key.symbol);
    ++i;
    if (i >= block.items.size()) fail(key, "value after " + key.symbol);
    if (word == ":param" || word == ":parameters") {
      if (seen_params) fail(key, "a single parameter section");
      action.params = symbol_list(block.items[i], "parameter");
      seen_params = true;
      ++i;
    } else if (word == ":pre" || word == ":precondition" || word == ":eff" ||
               word == ":effect") {
      const bool is_pre = word.starts_with(":pre");
      bool& seen = is_pre ? seen_pre : seen_eff;
      if (seen) fail(key, "a single " + std::string(is_pre ? "precondition" : "effect") + " section");
      seen = true;
      std::vector<Literal> literals;
      std::vector<Node> value;
      value.push_back(block.items[i]);
      ++i;
      if (!value.front().is_list && i < block.items.size() &&
          block.items[i].is_list && block.items[i].adjacent) {
        value.push_back(block.items[i]);
        ++i;
      }
      FormulaReader{}.items(value, 0, literals);
      (is_pre ? action.pre : action.eff) = std::move(literals);
    } else {
      fail(key, "':parameters', ':precondition' or ':effect'");
    }
  }
  return action;
}

void check_consistent(const std::vector<Literal>& literals, const std::string& where) {
  for (const auto& literal : literals) {
    if (std::find(literals.begin(), literals.end(), literal.negation()) != literals.end()) {
      throw ValidationError(where + " contains both " + to_string(literal.atom) +
                            " and its negation");
    }
  }
}

class PredicateTable {
 public:
  void declare(const std::string& name, std::size_t arity, const std::string& where) {
    auto it = index_.find(name);
    if (it == index_.end()) {
      index_.emplace(name, entries_.size());
      entries_.push_back({name, arity, PredicateKind::kSymbolic});
    } else if (entries_[it->second].arity != arity) {
      throw ArityMismatch("predicate '" + name + "' used with arity " +
                          std::to_string(arity) + " in " + where +
                          " but declared with arity " +
                          std::to_string(entries_[it->second].arity));
    }
  }

  PredicateInfo* find(const std::string& name) {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &entries_[it->second];
  }

  std::vector<PredicateInfo> release() { return std::move(entries_); }

 private:
  std::map<std::string, std::size_t> index_;
  std::vector<PredicateInfo> entries_;
};

// Lenient repair: a bare use of a predicate that appears elsewhere with one
// consistent argument list takes those arguments.
void promote_bare_atoms(std::vector<ActionSchema>& actions) {
  std::map<std::string, std::set<std::vector<std::string>>> uses;
  for (const auto& action : actions) {
    for (const auto* list : {&action.pre, &action.eff}) {
      for (const auto& literal : *list) {
        if (!literal.atom.args.empty()) {
          uses[literal.atom.predicate].insert(literal.atom.args);
        }
      }
    }
  }
  for (auto& action : actions) {
    for (auto* list : {&action.pre, &action.eff}) {
      for (auto& literal : *list) {
        if (!literal.atom.args.empty()) continue;
        auto it = uses.find(literal.atom.predicate);
        if (it != uses.end() && it->second.size() == 1) {
          literal.atom.args = *it->second.begin();
        }
      }
    }
  }
}

void check_bindings(const ActionSchema& action, const std::vector<std::string>& constants) {
  for (const auto* list : {&action.pre, &action.eff}) {
    for (const auto& literal : *list) {
      for (const auto& arg : literal.atom.args) {
        const bool bound =
            std::find(action.params.begin(), action.params.end(), arg) != action.params.end() ||
            (!is_variable(arg) &&
             std::find(constants.begin(), constants.end(), arg) != constants.end());
        if (!bound) {
          throw ValidationError("action '" + action.name + "' uses '" + arg +
                                "' which is neither a parameter nor a constant");
        }
      }
    }
  }
}

// Top-level blocks of a file: either the items of `(define ...)` or, in
// lenient mode, the bare sequence of blocks.
struct Unit {
  std::string kind;  // "domain" or "problem"
  std::string name;
  std::vector<const Node*> blocks;
};

Unit unwrap(const std::vector<Node>& top, const ParseOptions& options,
            const std::string& expected_kind) {
  Unit unit;
  const Node* define = nullptr;
  for (const auto& node : top) {
    if (node.head() == "define") {
      if (define != nullptr) fail(node, "a single '(define ...)'");
      define = &node;
    }
  }
  if (define == nullptr) {
    if (!options.lenient) {
      if (top.empty()) throw SyntaxError({}, "'(define'", "end of input");
      fail(top.front(), "'(define'");
    }
    unit.kind = expected_kind;
    unit.name = expected_kind == "domain" ? "d" : "p";
    for (const auto& node : top) {
      if (!node.is_list) fail(node, "'('");
      unit.blocks.push_back(&node);
    }
    return unit;
  }
  if (!options.lenient) {
    for (const auto& node : top) {
      if (&node != define) fail(node, "nothing outside '(define ...)'");
    }
  }
  if (define->items.size() < 2 || !define->items[1].is_list ||
      define->items[1].items.size() != 2) {
    fail(*define, "'(" + expected_kind + " <name>)' after 'define'");
  }
  const Node& header = define->items[1];
  unit.kind = header.head();
  if (unit.kind != expected_kind) fail(header.items.front(), "'" + expected_kind + "'");
  unit.name = identifier(header.items[1], expected_kind + " name");
  for (std::size_t i = 2; i < define->items.size(); ++i) {
    const Node& node = define->items[i];
    if (!node.is_list) fail(node, "'(' starting a section");
    unit.blocks.push_back(&node);
  }
  return unit;
}

}  // namespace

Domain parse_domain(std::string_view text, const ParseOptions& options) {
  const std::vector<Node> top = sexpr::read_all(text, options.lenient);
  const Unit unit = unwrap(top, options, "domain");

  Domain domain;
  domain.name = unit.name;
  std::vector<std::pair<std::string, std::size_t>> declared;
  std::vector<const Node*> neural_blocks;
  for (const Node* block : unit.blocks) {
    const std::string head = block->head();
    if (head == ":requirements") {
      continue;
    } else if (head == ":constants") {
      for (std::size_t i = 1; i < block->items.size(); ++i) {
        const std::string c = lowercase(identifier(block->items[i], "constant"));
        if (is_variable(c)) fail(block->items[i], "constant name without '?'");
        if (std::find(domain.constants.begin(), domain.constants.end(), c) !=
            domain.constants.end()) {
          throw ValidationError("constant '" + c + "' declared twice");
        }
        domain.constants.push_back(c);
      }
    } else if (head == ":predicates") {
      for (std::size_t i = 1; i < block->items.size(); ++i) {
        const Node& decl = block->items[i];
        if (!decl.is_list || decl.items.empty()) fail(decl, "'(<predicate> ?args...)'");
        const std::string name = lowercase(identifier(decl.items[0], "predicate name"));
        for (const auto& [seen, arity] : declared) {
          if (seen == name) throw ValidationError("predicate '" + name + "' declared twice");
        }
        declared.emplace_back(name, decl.items.size() - 1);
      }
    } else if (head == ":neural") {
      neural_blocks.push_back(block);
    } else if (head == ":action") {
      ActionSchema action = read_action(*block);
      if (domain.find_action(action.name) != nullptr) {
        throw DuplicateAction("action '" + action.name + "' is defined more than once");
      }
      domain.actions.push_back(std::move(action));
    } else if (options.lenient && (head == ":init" || head == ":goal")) {
      continue;  // problem sections embedded in a listing
    } else {
      fail(block->items.empty() ? *block : block->items.front(), "domain section");
    }
  }

  if (options.lenient) promote_bare_atoms(domain.actions);

  PredicateTable table;
  for (const auto& [name, arity] : declared) table.declare(name, arity, ":predicates");
  for (const auto& action : domain.actions) {
    for (const auto* list : {&action.pre, &action.eff}) {
      for (const auto& literal : *list) {
        table.declare(literal.atom.predicate, literal.atom.args.size(),
                      "action '" + action.name + "'");
      }
    }
  }
  std::set<std::string> neural_seen;
  for (const Node* block : neural_blocks) {
    for (std::size_t i = 1; i < block->items.size(); ++i) {
      const std::string name = lowercase(identifier(block->items[i], "predicate name"));
      if (!neural_seen.insert(name).second) {
        throw ValidationError("predicate '" + name + "' declared neural twice");
      }
      PredicateInfo* info = table.find(name);
      if (info == nullptr) {
        throw UnknownPredicate("neural predicate '" + name + "' is never declared or used");
      }
      info->kind = PredicateKind::kNeural;
    }
  }
  domain.predicates = table.release();

  for (const auto& action : domain.actions) {
    check_consistent(action.pre, "precondition of '" + action.name + "'");
    check_consistent(action.eff, "effect of '" + action.name + "'");
    check_bindings(action, domain.constants);
  }
  return domain;
}

Problem parse_problem(std::string_view text, const Domain& domain,
                      const ParseOptions& options) {
  const std::vector<Node> top = sexpr::read_all(text, options.lenient);
  const Unit unit = unwrap(top, options, "problem");

  Problem problem;
  problem.name = unit.name;
  bool seen_init = false;
  bool seen_goal = false;
  for (const Node* block : unit.blocks) {
    const std::string head = block->head();
    if (head == ":domain") {
      if (block->items.size() != 2) fail(*block, "'(:domain <name>)'");
      problem.domain_name = identifier(block->items[1], "domain name");
      if (lowercase(problem.domain_name) != lowercase(domain.name)) {
        throw ValidationError("problem refers to domain '" + problem.domain_name +
                              "' but '" + domain.name + "' was given");
      }
    } else if (head == ":init" || head == ":goal") {
      bool& seen = head == ":init" ? seen_init : seen_goal;
      if (seen) fail(block->items.front(), "a single " + head + " section");
      seen = true;
      std::vector<Literal> literals;
      FormulaReader{}.items(block->items, 1, literals);
      (head == ":init" ? problem.init : problem.goal) = std::move(literals);
    } else if (options.lenient && head == ":action") {
      continue;
    } else {
      fail(block->items.empty() ? *block : block->items.front(), "problem section");
    }
  }

  for (const auto* list : {&problem.init, &problem.goal}) {
    for (const auto& literal : *list) {
      const PredicateInfo* info = domain.find_predicate(literal.atom.predicate);
      if (info == nullptr) {
        throw UnknownPredicate("predicate '" + literal.atom.predicate +
                               "' is not part of domain '" + domain.name + "'");
      }
      if (info->arity != literal.atom.args.size()) {
        throw ArityMismatch("predicate '" + info->name + "' has arity " +
                            std::to_string(info->arity) + " but problem uses " +
                            std::to_string(literal.atom.args.size()));
      }
      for (const auto& arg : literal.atom.args) {
        if (is_variable(arg)) {
          throw ValidationError("problem literal " + to_string(literal) +
                                " is not ground");
        }
      }
    }
  }
  check_consistent(problem.init, "initial state");
  check_consistent(problem.goal, "goal");
  if (problem.goal.empty()) throw ValidationError("goal is empty");
  return problem;
}

namespace {

std::string format_literals(const std::vector<Literal>& literals) {
  if (literals.empty()) return "()";
  if (literals.size() == 1) return to_string(literals.front());
  std::string out = "(and";
  for (const auto& literal : literals) out += " " + to_string(literal);
  return out + ")";
}

}  // namespace

std::string format_domain(const Domain& domain) {
  std::ostringstream out;
  out << "(define (domain " << domain.name << ")";
  if (!domain.constants.empty()) {
    out << "\n  (:constants";
    for (const auto& c : domain.constants) out << ' ' << c;
    out << ")";
  }
  if (!domain.predicates.empty()) {
    out << "\n  (:predicates";
    for (const auto& p : domain.predicates) {
      out << " (" << p.name;
      for (std::size_t i = 0; i < p.arity; ++i) out << " ?a" << i;
      out << ")";
    }
    out << ")";
  }
  bool any_neural = false;
  for (const auto& p : domain.predicates) {
    if (p.kind != PredicateKind::kNeural) continue;
    out << (any_neural ? " " : "\n  (:neural ") << p.name;
    any_neural = true;
  }
  if (any_neural) out << ")";
  for (const auto& action : domain.actions) {
    out << "\n  (:action " << action.name << "\n    :parameters (";
    for (std::size_t i = 0; i < action.params.size(); ++i) {
      out << (i == 0 ? "" : " ") << action.params[i];
    }
    out << ")\n    :precondition " << format_literals(action.pre)
        << "\n    :effect " << format_literals(action.eff) << ")";
  }
  out << ")\n";
  return out.str();
}

std::string format_problem(const Problem& problem) {
  std::ostringstream out;
  out << "(define (problem " << problem.name << ")";
  if (!problem.domain_name.empty()) out << "\n  (:domain " << problem.domain_name << ")";
  out << "\n  (:init";
  for (const auto& literal : problem.init) out << ' ' << to_string(literal);
  out << ")\n  (:goal " << format_literals(problem.goal) << "))\n";
  return out.str();
}

}  // namespace boltdis
