#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "dstit/errors.hpp"
#include "dstit/syntax.hpp"

namespace dstit {

namespace {

enum class Tok { Ident, Nat, Tilde, Bang, LParen, RParen, And, Or, Implies, Iff, LBrack, RBrack, Lt, Gt, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Tok::Ident, std::string(s.substr(start, i - start)), start});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      out.push_back({Tok::Nat, std::string(s.substr(start, i - start)), start});
      continue;
    }
    auto two = s.substr(i, 2);
    auto three = s.substr(i, 3);
    if (three == "<->") {
      out.push_back({Tok::Iff, "<->", start});
      i += 3;
      continue;
    }
    if (two == "->") {
      out.push_back({Tok::Implies, "->", start});
      i += 2;
      continue;
    }
    Tok k;
    switch (c) {
      case '~': k = Tok::Tilde; break;
      case '!': k = Tok::Bang; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '&': k = Tok::And; break;
      case '|': k = Tok::Or; break;
      case '[': k = Tok::LBrack; break;
      case ']': k = Tok::RBrack; break;
      case '<': k = Tok::Lt; break;
      case '>': k = Tok::Gt; break;
      default: throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
    out.push_back({k, std::string(1, c), start});
    ++i;
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

bool reserved_word(const std::string& w) {
  return w == "box" || w == "dia" || w == "true" || w == "false";
}

class Parser {
public:
  Parser(std::string_view text, int agents, ParseOptions opts)
      : toks_(lex(text)), agents_(agents), opts_(opts) {}

  Formula run() {
    Formula f = parse_iff();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return f;
  }

private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    std::string m = msg;
    if (peek().kind == Tok::End && msg.rfind("unexpected", 0) != 0) m += " (end of input)";
    throw ParseError(m, peek().pos);
  }
  void expect(Tok k, const char* what) {
    if (!accept(k)) fail(std::string("expected ") + what);
  }

  Formula parse_iff() {
    Formula f = parse_implies();
    while (accept(Tok::Iff)) f = iff(f, parse_implies());
    return f;
  }

  Formula parse_implies() {
    Formula f = parse_or();
    if (accept(Tok::Implies)) return implies(f, parse_implies());
    return f;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (accept(Tok::Or)) f = Formula::disj(f, parse_and());
    return f;
  }

  Formula parse_and() {
    Formula f = parse_unary();
    while (accept(Tok::And)) f = Formula::conj(f, parse_unary());
    return f;
  }

  AgentId agent_index() {
    const Token& t = peek();
    if (t.kind != Tok::Nat) fail("expected agent index");
    ++pos_;
    long v = 0;
    try {
      v = std::stol(t.text);
    } catch (const std::out_of_range&) {
      v = -1;
    }
    if (v < 0 || v >= agents_) throw AgentRangeError(v < 0 ? -1 : static_cast<int>(v), agents_);
    return static_cast<AgentId>(v);
  }

  std::string identifier() {
    const Token& t = peek();
    if (t.kind != Tok::Ident) fail("expected identifier");
    if (reserved_word(t.text)) fail("reserved word '" + t.text + "' used as variable");
    if (t.text[0] == '_' && !opts_.allowReserved) fail("identifiers may not start with '_'");
    ++pos_;
    return t.text;
  }

  Formula parse_unary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Bang: ++pos_; return negate(parse_unary());
      case Tok::Tilde: ++pos_; return Formula::neg_atom(identifier());
      case Tok::LParen: {
        ++pos_;
        Formula f = parse_iff();
        expect(Tok::RParen, "')'");
        return f;
      }
      case Tok::LBrack: {
        ++pos_;
        AgentId i = agent_index();
        expect(Tok::RBrack, "']'");
        return Formula::agbox(i, parse_unary());
      }
      case Tok::Lt: {
        ++pos_;
        AgentId i = agent_index();
        expect(Tok::Gt, "'>'");
        return Formula::agdia(i, parse_unary());
      }
      case Tok::Ident: {
        if (t.text == "box") {
          ++pos_;
          return Formula::box(parse_unary());
        }
        if (t.text == "dia") {
          ++pos_;
          return Formula::dia(parse_unary());
        }
        if (t.text == "true") {
          ++pos_;
          return top();
        }
        if (t.text == "false") {
          ++pos_;
          return bottom();
        }
        if ((t.text == "O" || t.text == "P") && peek(1).kind == Tok::LBrack) {
          bool ought = t.text == "O";
          pos_ += 2;
          AgentId i = agent_index();
          expect(Tok::RBrack, "']'");
          Formula body = parse_unary();
          return ought ? Formula::ought(i, body) : Formula::perm(i, body);
        }
        return Formula::atom(identifier());
      }
      default: fail(t.kind == Tok::End ? "expected formula" : "unexpected '" + t.text + "'");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int agents_;
  ParseOptions opts_;
};

}  // namespace

Formula parse(std::string_view text, int agentCount, ParseOptions opts) {
  return Parser(text, agentCount, opts).run();
}

}  // namespace dstit
