#include "pkrn/rlisp.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>

#include "pkrn/errors.hpp"
#include "pkrn/numeric.hpp"
#include "pkrn/session.hpp"
#include "pkrn/sexpr.hpp"

namespace pkrn {

namespace {

constexpr std::array<std::string_view, 23> kKeywords = {
    "procedure", "for", "step",   "until",  "do",    "sum", "product", "while", "if",  "then", "else",  "begin",
    "end",       "scalar", "return", "write", "and", "or",  "not",     "neq",   "repeat", "go", "goto",
};

bool is_keyword(std::string_view s) { return std::find(kKeywords.begin(), kKeywords.end(), s) != kKeywords.end(); }

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '!'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '!'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) {
        out.push_back(Token{TokenKind::end, "", line_, col_});
        return out;
      }
      out.push_back(token());
    }
  }

 private:
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg, bool incomplete = false) const {
    throw ParseError(msg, line_, col_, incomplete);
  }

  Token token() {
    const std::size_t line = line_;
    const std::size_t col = col_;
    const char c = peek();
    const auto make = [&](TokenKind k, std::string text) { return Token{k, std::move(text), line, col}; };
    if (ident_start(c)) {
      std::string name;
      while (pos_ < text_.size() && ident_char(peek())) {
        if (peek() == '!') {
          advance();
          if (pos_ >= text_.size()) fail("'!' at end of input", true);
        }
        name += peek();
        advance();
      }
      return make(is_keyword(name) ? TokenKind::keyword : TokenKind::identifier, name);
    }
    if (digit(c)) {
      std::string num;
      while (digit(peek())) {
        num += peek();
        advance();
      }
      if (peek() == '.' && digit(peek(1))) {
        num += '.';
        advance();
        while (digit(peek())) {
          num += peek();
          advance();
        }
        return make(TokenKind::floating, num);
      }
      return make(TokenKind::integer, num);
    }
    if (c == '"') {
      std::string str;
      advance();
      for (;;) {
        if (pos_ >= text_.size()) fail("unterminated string", true);
        const char ch = peek();
        advance();
        if (ch == '"') {
          if (peek() != '"') break;
          advance();
        }
        str += ch;
      }
      return make(TokenKind::string, str);
    }
    if (c == '\'') {
      advance();
      return make(TokenKind::quoted, datum());
    }
    static constexpr std::string_view kTwo[] = {":=", "<=", ">=", "<<", ">>", "**"};
    for (auto op : kTwo) {
      if (peek() == op[0] && peek(1) == op[1]) {
        advance();
        advance();
        return make(TokenKind::op, op == "**" ? "^" : std::string(op));
      }
    }
    if (std::string_view("+-*/^=<>():,;$").find(c) != std::string_view::npos) {
      advance();
      return make(TokenKind::op, std::string(1, c));
    }
    fail(std::string("illegal character '") + c + "'");
  }

  // Source text of the S-expression following a quote.
  std::string datum() {
    skip_space();
    const std::size_t start = pos_;
    if (peek() == '(' || peek() == '[') {
      int depth = 0;
      do {
        if (pos_ >= text_.size()) fail("unterminated quoted datum", true);
        const char ch = peek();
        if (ch == '!') {
          advance();
          if (pos_ >= text_.size()) fail("'!' at end of input", true);
        } else if (ch == '"') {
          advance();
          while (pos_ < text_.size() && peek() != '"') advance();
          if (pos_ >= text_.size()) fail("unterminated string", true);
        } else if (ch == '%') {
          while (pos_ < text_.size() && peek() != '\n') advance();
          continue;
        } else if (ch == '(' || ch == '[') {
          ++depth;
        } else if (ch == ')' || ch == ']') {
          --depth;
        }
        advance();
      } while (depth > 0);
    } else if (peek() == '\'') {
      advance();
      return "'" + datum();
    } else {
      while (pos_ < text_.size()) {
        const char ch = peek();
        if (ch == '!') {
          advance();
          if (pos_ < text_.size()) advance();
          continue;
        }
        if (std::isspace(static_cast<unsigned char>(ch)) || std::string_view("();$,'\"%").find(ch) != std::string_view::npos) {
          break;
        }
        advance();
      }
      if (pos_ == start) fail("expected a datum after quote", pos_ >= text_.size());
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

// Translation target, converted to heap Values once a statement is complete
// so that the parser itself never holds unrooted references.
struct Node {
  enum Kind { symbol, integer, floating, string, datum, list } kind;
  std::string text;
  std::vector<Node> items;

  static Node sym(std::string name) { return Node{symbol, std::move(name), {}}; }
  static Node num(std::int64_t n) { return Node{integer, std::to_string(n), {}}; }
  static Node of(std::vector<Node> items) { return Node{list, "", std::move(items)}; }
  bool is_sym(std::string_view name) const { return kind == symbol && text == name; }
};

Node call(std::string fn, std::vector<Node> args) {
  args.insert(args.begin(), Node::sym(std::move(fn)));
  return Node::of(std::move(args));
}

Value to_value(Session& s, const Node& n) {
  Heap& h = s.heap();
  switch (n.kind) {
    case Node::symbol:
      return s.intern(n.text);
    case Node::integer:
      return big_from_decimal(h, n.text);
    case Node::floating:
      return h.make_float(std::stod(n.text));
    case Node::string:
      return h.make_string(n.text);
    case Node::datum:
      return read(h, n.text).value;
    case Node::list:
      break;
  }
  RootScope roots(h.stack());
  ShadowStack& st = h.stack();
  const std::size_t base = st.size();
  for (const Node& item : n.items) roots.push(to_value(s, item));
  Value& acc = roots.push(kNil);
  for (std::size_t i = st.size() - 1; i-- > base;) acc = h.alloc_cons(st[i], acc);
  return acc;
}

struct Parsed {
  Node node;
  bool expression;
};

class Parser {
 public:
  Parser(const std::vector<Token>& tokens, std::size_t& pos, bool eof_terminates)
      : t_(tokens), pos_(pos), eof_terminates_(eof_terminates) {}

  // One top-level statement with its terminator; nullopt at end of input.
  std::optional<std::pair<Node, bool>> top() {
    while (is_op(";") || is_op("$")) ++pos_;
    if (cur().kind == TokenKind::end) return std::nullopt;
    Parsed p = statement();
    bool echo = false;
    if (is_op(";")) {
      echo = p.expression;
      ++pos_;
    } else if (is_op("$")) {
      ++pos_;
    } else if (cur().kind == TokenKind::end) {
      if (!eof_terminates_) fail("expected ';'");
      echo = p.expression;
    } else {
      fail("expected ';'");
    }
    return std::make_pair(std::move(p.node), echo);
  }

 private:
  const Token& cur() const { return t_[pos_]; }
  const Token& ahead(std::size_t n) const { return t_[std::min(pos_ + n, t_.size() - 1)]; }
  bool is_op(std::string_view op) const { return cur().kind == TokenKind::op && cur().text == op; }
  bool is_kw(std::string_view kw) const { return cur().kind == TokenKind::keyword && cur().text == kw; }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = cur();
    const std::string found = t.kind == TokenKind::end ? "end of input" : "'" + t.text + "'";
    throw ParseError(expected + ", found " + found, t.line, t.column, t.kind == TokenKind::end);
  }

  void expect_op(std::string_view op) {
    if (!is_op(op)) fail("expected '" + std::string(op) + "'");
    ++pos_;
  }

  void expect_kw(std::string_view kw) {
    if (!is_kw(kw)) fail("expected '" + std::string(kw) + "'");
    ++pos_;
  }

  std::string identifier(const char* what) {
    if (cur().kind != TokenKind::identifier) fail(std::string("expected ") + what);
    return t_[pos_++].text;
  }

  Parsed statement() {
    if (is_kw("procedure")) return {procedure(), false};
    if (is_kw("for")) return for_loop();
    if (is_kw("while")) return {while_loop(), false};
    if (is_kw("repeat")) return {repeat_loop(), false};
    if (is_kw("if")) return {if_stmt(), true};
    if (is_kw("begin")) return {block(), false};
    if (is_op("<<")) return {group(), true};
    if (is_kw("return")) {
      ++pos_;
      if (ends_statement()) return {call("return", {}), false};
      return {call("return", {expr()}), false};
    }
    if (is_kw("go") || is_kw("goto")) {
      // go to L, go L, goto L
      if (is_kw("go") && ahead(1).kind == TokenKind::identifier && ahead(1).text == "to") ++pos_;
      ++pos_;
      return {call("go", {Node::sym(identifier("label"))}), false};
    }
    if (is_kw("write")) {
      ++pos_;
      std::vector<Node> args{expr()};
      while (is_op(",")) {
        ++pos_;
        args.push_back(expr());
      }
      return {call("write", std::move(args)), false};
    }
    if (cur().kind == TokenKind::identifier && ahead(1).kind == TokenKind::op && ahead(1).text == ":=") {
      std::string var = identifier("identifier");
      ++pos_;
      Parsed rhs = statement();
      return {call("setq", {Node::sym(var), std::move(rhs.node)}), false};
    }
    return {expr(), true};
  }

  bool ends_statement() const {
    return is_op(";") || is_op("$") || is_kw("end") || is_kw("else") || is_op(">>") || cur().kind == TokenKind::end;
  }

  Node procedure() {
    expect_kw("procedure");
    std::string name = identifier("procedure name");
    std::vector<Node> params;
    if (is_op("(")) {
      ++pos_;
      if (!is_op(")")) {
        params.push_back(Node::sym(identifier("parameter name")));
        while (is_op(",")) {
          ++pos_;
          params.push_back(Node::sym(identifier("parameter name")));
        }
      }
      expect_op(")");
    } else if (cur().kind == TokenKind::identifier) {
      params.push_back(Node::sym(identifier("parameter name")));
    }
    expect_op(";");
    Node body = statement().node;
    return call("de", {Node::sym(name), Node::of(std::move(params)), std::move(body)});
  }

  // for v := a : b (do s | sum e | product e), or `step s until b` for ':'.
  Parsed for_loop() {
    expect_kw("for");
    std::string var = identifier("loop variable");
    expect_op(":=");
    Node from = expr();
    std::optional<Node> step;
    if (is_op(":")) {
      ++pos_;
    } else if (is_kw("step")) {
      ++pos_;
      step = expr();
      expect_kw("until");
    } else {
      fail("expected ':' or 'step'");
    }
    Node limit = expr();
    std::string action;
    if (is_kw("do") || is_kw("sum") || is_kw("product")) {
      action = cur().text;
      ++pos_;
    } else {
      fail("expected 'do', 'sum' or 'product'");
    }
    Node body = action == "do" ? statement().node : expr();

    const bool negative_step =
        step && step->kind == Node::list && step->items.size() == 2 && step->items[0].is_sym("minus");
    Node v = Node::sym(var);
    std::vector<Node> prog{Node::sym("prog"), Node::of({v, Node::sym("%acc"), Node::sym("%lim")})};
    const bool accumulates = action != "do";
    if (accumulates) prog.push_back(call("setq", {Node::sym("%acc"), Node::num(action == "sum" ? 0 : 1)}));
    prog.push_back(call("setq", {Node::sym("%lim"), std::move(limit)}));
    prog.push_back(call("setq", {v, std::move(from)}));
    prog.push_back(Node::sym("%loop"));
    Node done = call(negative_step ? "lessp" : "greaterp", {v, Node::sym("%lim")});
    prog.push_back(call("cond", {Node::of({std::move(done), call("return", {accumulates ? Node::sym("%acc") : Node::sym("nil")})})}));
    if (accumulates) {
      prog.push_back(call("setq", {Node::sym("%acc"), call(action == "sum" ? "plus" : "times", {Node::sym("%acc"), std::move(body)})}));
    } else {
      prog.push_back(std::move(body));
    }
    prog.push_back(call("setq", {v, call("plus", {v, step ? std::move(*step) : Node::num(1)})}));
    prog.push_back(call("go", {Node::sym("%loop")}));
    return {Node::of(std::move(prog)), accumulates};
  }

  Node while_loop() {
    expect_kw("while");
    Node test = expr();
    expect_kw("do");
    Node body = statement().node;
    return Node::of({Node::sym("prog"), Node::of({}), Node::sym("%loop"),
                     call("cond", {Node::of({call("not", {std::move(test)}), call("return", {Node::sym("nil")})})}),
                     std::move(body), call("go", {Node::sym("%loop")})});
  }

  Node repeat_loop() {
    expect_kw("repeat");
    Node body = statement().node;
    expect_kw("until");
    Node test = expr();
    return Node::of({Node::sym("prog"), Node::of({}), Node::sym("%loop"), std::move(body),
                     call("cond", {Node::of({std::move(test), call("return", {Node::sym("nil")})})}),
                     call("go", {Node::sym("%loop")})});
  }

  Node if_stmt() {
    expect_kw("if");
    Node test = expr();
    expect_kw("then");
    Node then = statement().node;
    std::vector<Node> clauses{Node::of({std::move(test), std::move(then)})};
    if (is_kw("else")) {
      ++pos_;
      clauses.push_back(Node::of({Node::sym("t"), statement().node}));
    }
    return call("cond", std::move(clauses));
  }

  Node block() {
    expect_kw("begin");
    std::vector<Node> vars;
    while (is_kw("scalar")) {
      ++pos_;
      vars.push_back(Node::sym(identifier("variable name")));
      while (is_op(",")) {
        ++pos_;
        vars.push_back(Node::sym(identifier("variable name")));
      }
      if (!is_op(";") && !is_op("$")) fail("expected ';'");
      ++pos_;
    }
    std::vector<Node> prog{Node::sym("prog"), Node::of(std::move(vars))};
    for (;;) {
      while (is_op(";") || is_op("$")) ++pos_;
      if (is_kw("end")) break;
      if (cur().kind == TokenKind::identifier && ahead(1).kind == TokenKind::op && ahead(1).text == ":") {
        prog.push_back(Node::sym(identifier("label")));
        ++pos_;
        continue;
      }
      prog.push_back(statement().node);
      if (!is_op(";") && !is_op("$") && !is_kw("end")) fail("expected ';' or 'end'");
    }
    expect_kw("end");
    return Node::of(std::move(prog));
  }

  Node group() {
    expect_op("<<");
    std::vector<Node> forms{Node::sym("progn")};
    for (;;) {
      while (is_op(";") || is_op("$")) ++pos_;
      if (is_op(">>")) break;
      forms.push_back(statement().node);
      if (!is_op(";") && !is_op("$") && !is_op(">>")) fail("expected ';' or '>>'");
    }
    expect_op(">>");
    return Node::of(std::move(forms));
  }

  Node expr() { return disjunction(); }

  Node disjunction() {
    Node lhs = conjunction();
    while (is_kw("or")) {
      ++pos_;
      lhs = call("or", {std::move(lhs), conjunction()});
    }
    return lhs;
  }

  Node conjunction() {
    Node lhs = negation();
    while (is_kw("and")) {
      ++pos_;
      lhs = call("and", {std::move(lhs), negation()});
    }
    return lhs;
  }

  Node negation() {
    if (is_kw("not")) {
      ++pos_;
      return call("not", {negation()});
    }
    return comparison();
  }

  Node comparison() {
    Node lhs = additive();
    static constexpr std::pair<std::string_view, const char*> kRel[] = {
        {"=", "equal"}, {"<", "lessp"}, {">", "greaterp"}, {"<=", "leq"}, {">=", "geq"}};
    for (auto [op, fn] : kRel) {
      if (is_op(op)) {
        ++pos_;
        return call(fn, {std::move(lhs), additive()});
      }
    }
    if (is_kw("neq")) {
      ++pos_;
      return call("not", {call("equal", {std::move(lhs), additive()})});
    }
    return lhs;
  }

  Node additive() {
    Node lhs = term();
    while (is_op("+") || is_op("-")) {
      const char* fn = is_op("+") ? "plus" : "difference";
      ++pos_;
      lhs = call(fn, {std::move(lhs), term()});
    }
    return lhs;
  }

  Node term() {
    Node lhs = unary();
    while (is_op("*") || is_op("/")) {
      const char* fn = is_op("*") ? "times" : "quotient";
      ++pos_;
      lhs = call(fn, {std::move(lhs), unary()});
    }
    return lhs;
  }

  Node unary() {
    if (is_op("-")) {
      ++pos_;
      return call("minus", {unary()});
    }
    if (is_op("+")) {
      ++pos_;
      return unary();
    }
    return power();
  }

  Node power() {
    Node base = application();
    if (is_op("^")) {
      ++pos_;
      return call("expt", {std::move(base), unary()});
    }
    return base;
  }

  bool starts_primary() const {
    switch (cur().kind) {
      case TokenKind::identifier:
      case TokenKind::integer:
      case TokenKind::floating:
      case TokenKind::string:
      case TokenKind::quoted:
        return true;
      case TokenKind::op:
        return cur().text == "(";
      default:
        return false;
    }
  }

  Node application() {
    if (cur().kind != TokenKind::identifier) return primary();
    std::string fn = identifier("identifier");
    if (is_op("(")) {
      ++pos_;
      std::vector<Node> args;
      if (!is_op(")")) {
        args.push_back(expr());
        while (is_op(",")) {
          ++pos_;
          args.push_back(expr());
        }
      }
      expect_op(")");
      return call(fn, std::move(args));
    }
    if (starts_primary()) return call(fn, {application()});
    return Node::sym(fn);
  }

  Node primary() {
    const Token& t = cur();
    switch (t.kind) {
      case TokenKind::integer:
        ++pos_;
        return Node{Node::integer, t.text, {}};
      case TokenKind::floating:
        ++pos_;
        return Node{Node::floating, t.text, {}};
      case TokenKind::string:
        ++pos_;
        return Node{Node::string, t.text, {}};
      case TokenKind::quoted:
        ++pos_;
        return call("quote", {Node{Node::datum, t.text, {}}});
      case TokenKind::keyword:
        if (t.text == "if") return if_stmt();
        if (t.text == "for") return for_loop().node;
        if (t.text == "begin") return block();
        break;
      case TokenKind::op:
        if (t.text == "(") {
          ++pos_;
          Node inner = expr();
          expect_op(")");
          return inner;
        }
        if (t.text == "<<") return group();
        break;
      default:
        break;
    }
    fail("expected an expression");
  }

  const std::vector<Token>& t_;
  std::size_t& pos_;
  bool eof_terminates_;
};

struct Adaptation {
  const char* name;
  std::size_t arity;
};

// Functions whose list-first dialect swaps the first two arguments.
constexpr Adaptation kListFirst[] = {{"mapcar", 2}, {"map", 2}};

}  // namespace

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

Value dialect_adapt(Session& s, Value form, Dialect dialect) {
  Heap& h = s.heap();
  if (dialect == Dialect::fn_first || !form.is_cons()) return form;
  Value head = h.car(form);
  if (head == s.sym().quote) return form;
  RootScope roots(h.stack());
  roots.push(form);
  std::vector<Value> items;
  Value tail = form;
  for (; tail.is_cons(); tail = h.cdr(tail)) items.push_back(h.car(tail));
  ShadowStack& st = h.stack();
  const std::size_t base = st.size();
  for (Value item : items) roots.push(dialect_adapt(s, item, dialect));
  if (head.is_symbol()) {
    for (const auto& rule : kListFirst) {
      if (s.name(head) == rule.name && items.size() == rule.arity + 1) std::swap(st[base + 1], st[base + 2]);
    }
  }
  Value& acc = roots.push(tail);
  for (std::size_t i = base + items.size(); i-- > base;) acc = h.alloc_cons(st[i], acc);
  return acc;
}

RlispParser::RlispParser(Session& s, std::string_view text, Dialect dialect, bool eof_terminates)
    : session_(s), tokens_(tokenize(text)), dialect_(dialect), eof_terminates_(eof_terminates) {}

std::optional<Statement> RlispParser::next() {
  Parser p(tokens_, pos_, eof_terminates_);
  auto parsed = p.top();
  if (!parsed) return std::nullopt;
  RootScope roots(session_.heap().stack());
  Value form = roots.push(to_value(session_, parsed->first));
  return Statement{dialect_adapt(session_, form, dialect_), parsed->second};
}

Value translate_program(Session& s, std::string_view text, Dialect dialect) {
  RlispParser parser(s, text, dialect);
  RootScope roots(s.heap().stack());
  ShadowStack& st = s.heap().stack();
  const std::size_t base = st.size();
  while (auto stmt = parser.next()) roots.push(stmt->form);
  return s.list(st.range(base, st.size()));
}

}  // namespace pkrn
