#include "sexpr.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace boltdis::sexpr {
namespace {

enum class TokenKind { kOpen, kClose, kSymbol };

struct Token {
  TokenKind kind;
  std::string text;
  SourcePos pos;
  bool adjacent = false;  // no whitespace between this token and a symbol before it
};

bool is_delimiter(char c) {
  return c == '(' || c == ')' || c == ';' ||
         std::isspace(static_cast<unsigned char>(c)) != 0;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  SourcePos pos;
  bool after_symbol = false;
  std::size_t i = 0;
  auto advance = [&](char c) {
    if (c == '\n') {
      ++pos.line;
      pos.column = 1;
    } else {
      ++pos.column;
    }
    ++i;
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == ';') {
      while (i < text.size() && text[i] != '\n') advance(text[i]);
      after_symbol = false;
    } else if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      advance(c);
      after_symbol = false;
    } else if (c == '(' || c == ')') {
      tokens.push_back({c == '(' ? TokenKind::kOpen : TokenKind::kClose,
                        std::string(1, c), pos, after_symbol});
      advance(c);
      after_symbol = false;
    } else {
      Token token{TokenKind::kSymbol, {}, pos, false};
      while (i < text.size() && !is_delimiter(text[i])) {
        token.text.push_back(text[i]);
        advance(text[i]);
      }
      tokens.push_back(std::move(token));
      after_symbol = true;
    }
  }
  return tokens;
}

bool is_block_keyword(std::string_view lowered) {
  static constexpr std::string_view kBlocks[] = {
      ":action", ":init",    ":goal",   ":neural",
      ":predicates", ":constants", ":requirements", ":domain"};
  return std::find(std::begin(kBlocks), std::end(kBlocks), lowered) !=
         std::end(kBlocks);
}

bool is_section_keyword(std::string_view lowered) {
  static constexpr std::string_view kSections[] = {
      ":param", ":parameters", ":pre", ":precondition", ":eff", ":effect"};
  return std::find(std::begin(kSections), std::end(kSections), lowered) !=
         std::end(kSections);
}

class Reader {
 public:
  Reader(std::vector<Token> tokens, bool lenient)
      : tokens_(std::move(tokens)), lenient_(lenient) {
    stack_.push_back(Node{true, {}, {}, {}, false});
  }

  std::vector<Node> run() {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      const Token& token = tokens_[i];
      switch (token.kind) {
        case TokenKind::kOpen:
          if (lenient_ && i + 1 < tokens_.size() &&
              tokens_[i + 1].kind == TokenKind::kSymbol &&
              is_block_keyword(lowercase(tokens_[i + 1].text))) {
            close_until_block_parent();
          }
          stack_.push_back(Node{true, {}, {}, token.pos, token.adjacent});
          break;
        case TokenKind::kClose:
          if (stack_.size() == 1) {
            if (lenient_) break;
            throw SyntaxError(token.pos, "'(' or end of input", "')'");
          }
          close_top();
          break;
        case TokenKind::kSymbol:
          if (lenient_ && is_section_keyword(lowercase(token.text))) {
            close_until_action();
          }
          stack_.back().items.push_back(
              Node{false, token.text, {}, token.pos, false});
          break;
      }
    }
    if (stack_.size() > 1) {
      if (!lenient_) {
        SourcePos end = tokens_.empty() ? SourcePos{} : tokens_.back().pos;
        throw SyntaxError(end, "')' closing list opened at line " +
                                   std::to_string(stack_.back().pos.line) +
                                   ", column " +
                                   std::to_string(stack_.back().pos.column),
                          "end of input");
      }
      while (stack_.size() > 1) close_top();
    }
    return std::move(stack_.front().items);
  }

 private:
  void close_top() {
    Node done = std::move(stack_.back());
    stack_.pop_back();
    stack_.back().items.push_back(std::move(done));
  }

  void close_until_block_parent() {
    while (stack_.size() > 1 && stack_.back().head() != "define") close_top();
  }

  void close_until_action() {
    auto action = std::find_if(stack_.rbegin(), stack_.rend(), [](const Node& n) {
      return n.head() == ":action";
    });
    if (action == stack_.rend()) return;
    const auto depth = static_cast<std::size_t>(stack_.rend() - action);
    while (stack_.size() > depth) close_top();
  }

  std::vector<Token> tokens_;
  bool lenient_;
  std::vector<Node> stack_;
};

}  // namespace

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

bool Node::is_symbol(std::string_view lowered) const {
  return !is_list && lowercase(symbol) == lowered;
}

std::string Node::head() const {
  if (!is_list || items.empty() || items.front().is_list) return {};
  return lowercase(items.front().symbol);
}

std::vector<Node> read_all(std::string_view text, bool lenient) {
  return Reader(tokenize(text), lenient).run();
}

std::string describe(const Node& node) {
  if (!node.is_list) return "'" + node.symbol + "'";
  if (node.items.empty()) return "'()'";
  return "list starting with " + describe(node.items.front());
}

}  // namespace boltdis::sexpr
