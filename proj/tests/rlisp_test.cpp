#include <gtest/gtest.h>

#include <sstream>

#include "pkrn/driver.hpp"
#include "pkrn/errors.hpp"
#include "pkrn/rlisp.hpp"
#include "pkrn/session.hpp"
#include "pkrn/sexpr.hpp"
#include "support.hpp"

namespace pkrn {
namespace {

using testing::run_rlisp;

std::string kinds(std::string_view text) {
  std::string out;
  for (const Token& t : tokenize(text)) {
    if (!out.empty()) out += ' ';
    switch (t.kind) {
      case TokenKind::identifier: out += "id:"; break;
      case TokenKind::integer: out += "int:"; break;
      case TokenKind::floating: out += "float:"; break;
      case TokenKind::string: out += "str:"; break;
      case TokenKind::op: out += "op:"; break;
      case TokenKind::keyword: out += "kw:"; break;
      case TokenKind::quoted: out += "quote:"; break;
      case TokenKind::end: out += "end"; continue;
    }
    out += t.text;
  }
  return out;
}

std::vector<std::string> translate(std::string_view text, Dialect dialect = Dialect::fn_first) {
  Session s;
  RootScope roots(s.heap().stack());
  std::vector<std::string> out;
  RlispParser parser(s, text, dialect);
  while (auto stmt = parser.next()) out.push_back(s.print(roots.push(stmt->form)) + (stmt->echo ? " ;" : ""));
  return out;
}

std::string translate_one(std::string_view text) {
  auto forms = translate(text);
  return forms.size() == 1 ? forms[0] : "<" + std::to_string(forms.size()) + " forms>";
}

TEST(Tokenizer, Examples) {
  EXPECT_EQ(kinds("x^2-1"), "id:x op:^ int:2 op:- int:1 end");
  EXPECT_EQ(kinds("for i := 1:n product i;"), "kw:for id:i op::= int:1 op:: id:n kw:product id:i op:; end");
  EXPECT_EQ(kinds("1:n"), kinds("1 : n"));
  EXPECT_EQ(kinds("a**b <= c"), "id:a op:^ id:b op:<= id:c end");
  EXPECT_EQ(kinds("write \"s\", 2.5$"), "kw:write str:s op:, float:2.5 op:$ end");
  EXPECT_EQ(kinds("'(a (b) . c)"), "quote:(a (b) . c) end");
  EXPECT_EQ(kinds("x!+y % comment\n<<z>>"), "id:x+y op:<< id:z op:>> end");
}

TEST(Tokenizer, PositionsAndErrors) {
  const auto tokens = tokenize("a\n  bb");
  ASSERT_EQ(tokens.size(), 3u);
  EXPECT_EQ(tokens[1].line, 2u);
  EXPECT_EQ(tokens[1].column, 3u);
  try {
    tokenize("x := 1 # 2;");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_EQ(e.column(), 8u);
  }
  EXPECT_THROW(tokenize("\"open"), ParseError);
  EXPECT_THROW(tokenize("'(a b"), ParseError);
}

TEST(Translate, Expressions) {
  EXPECT_EQ(translate_one("df((x^2-1)^2, x, 2);"), "(df (expt (difference (expt x 2) 1) 2) x 2) ;");
  EXPECT_EQ(translate_one("a*b+c/d-e;"), "(difference (plus (times a b) (quotient c d)) e) ;");
  EXPECT_EQ(translate_one("a^b^c;"), "(expt a (expt b c)) ;");
  EXPECT_EQ(translate_one("-x^2;"), "(minus (expt x 2)) ;");
  EXPECT_EQ(translate_one("2^-1;"), "(expt 2 (minus 1)) ;");
  EXPECT_EQ(translate_one("factorial k / 2;"), "(quotient (factorial k) 2) ;");
  EXPECT_EQ(translate_one("f();"), "(f) ;");
  EXPECT_EQ(translate_one("not a and b or c;"), "(or (and (not a) b) c) ;");
  EXPECT_EQ(translate_one("x neq y;"), "(not (equal x y)) ;");
  EXPECT_EQ(translate_one("a + 1 >= b;"), "(geq (plus a 1) b) ;");
  EXPECT_EQ(translate_one("a := '(1 2 . 3);"), "(setq a (quote (1 2 . 3)))");
  EXPECT_EQ(translate_one("x := y := 2$"), "(setq x (setq y 2))");
}

TEST(Translate, Statements) {
  EXPECT_EQ(translate_one("procedure f x; x;"), "(de f (x) x)");
  EXPECT_EQ(translate_one("procedure g(a, b); begin scalar t1; t1 := a; return t1 + b end;"),
            "(de g (a b) (prog (t1) (setq t1 a) (return (plus t1 b))))");
  EXPECT_EQ(translate_one("if a > b then a else b;"), "(cond ((greaterp a b) a) (t b)) ;");
  EXPECT_EQ(translate_one("while x < 3 do x := x + 1;"),
            "(prog nil !%loop (cond ((not (lessp x 3)) (return nil))) (setq x (plus x 1)) (go !%loop))");
  EXPECT_EQ(translate_one("repeat x := x + 1 until x > 3;"),
            "(prog nil !%loop (setq x (plus x 1)) (cond ((greaterp x 3) (return nil))) (go !%loop))");
  EXPECT_EQ(translate_one("write \"hi\", x;"), "(write \"hi\" x)");
  EXPECT_EQ(translate_one("<<a; b>>;"), "(progn a b) ;");
}

TEST(Translate, ForLoopsLowerToProg) {
  EXPECT_EQ(translate_one("for i := 1:n sum i^2;"),
            "(prog (i !%acc !%lim) (setq !%acc 0) (setq !%lim n) (setq i 1) !%loop (cond ((greaterp i !%lim) "
            "(return !%acc))) (setq !%acc (plus !%acc (expt i 2))) (setq i (plus i 1)) (go !%loop)) ;");
  EXPECT_EQ(translate_one("for i := 5 step -1 until 1 do write i;"),
            "(prog (i !%acc !%lim) (setq !%lim 1) (setq i 5) !%loop (cond ((lessp i !%lim) (return nil))) "
            "(write i) (setq i (plus i (minus 1))) (go !%loop))");
  const std::string product = translate_one("for i := 1:n product i;");
  EXPECT_NE(product.find("(setq !%acc 1)"), std::string::npos);
  EXPECT_NE(product.find("(times !%acc i)"), std::string::npos);
}

TEST(Translate, SyntaxErrorsCarryPositions) {
  const auto message = [](std::string_view text) {
    try {
      translate(text);
    } catch (const ParseError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_EQ(message("x := ;"), "expected an expression, found ';' at line 1, column 6");
  EXPECT_EQ(message("1:n;"), "expected ';', found ':' at line 1, column 2");
  EXPECT_EQ(message("begin x"), "expected ';' or 'end', found end of input at line 1, column 8");
  EXPECT_EQ(message("procedure for x; x;").substr(0, 8), "expected");
}

TEST(Translate, IncompleteInputIsFlagged) {
  Session s;
  for (const char* text : {"begin x;", "x := 1 +", "procedure f x;", "for i := 1:3 do"}) {
    RlispParser parser(s, text, Dialect::fn_first, false);
    try {
      while (parser.next()) {
      }
      ADD_FAILURE() << text;
    } catch (const ParseError& e) {
      EXPECT_TRUE(e.incomplete()) << text;
    }
  }
}

TEST(Evaluate, FactorialFromTheListing) {
  Session s;
  EXPECT_EQ(run_rlisp(s, "procedure factorial n; for i := 1:n product i;\nfactorial(5);"), "120\n");
  EXPECT_EQ(run_rlisp(s, "factorial 0; factorial 30;"), "1\n265252859812191058636308480000000\n");
}

TEST(Evaluate, EchoRules) {
  Session s;
  EXPECT_EQ(run_rlisp(s, "2+3*4;"), "14\n");
  EXPECT_EQ(run_rlisp(s, "2+3*4$"), "");
  EXPECT_EQ(run_rlisp(s, "x := 3;"), "");
  EXPECT_EQ(run_rlisp(s, "x;"), "3\n");
  EXPECT_EQ(run_rlisp(s, "if x > 2 then 'big else 'small;"), "big\n");
  EXPECT_EQ(run_rlisp(s, "write \"x = \", x;"), "x = 3\n");
  EXPECT_EQ(run_rlisp(s, "for i := 1:10 sum i;"), "55\n");
  EXPECT_EQ(run_rlisp(s, "for i := 3:1 sum i; for i := 3:1 product i;"), "0\n1\n");
  EXPECT_EQ(run_rlisp(s, "-7/2;"), "-3\n");
}

TEST(Dialect, AdaptationTable) {
  Session s;
  RootScope roots(s.heap().stack());
  const auto adapt = [&](std::string_view text, Dialect d) {
    Value form = roots.push(read(s.heap(), text).value);
    return s.print(roots.push(dialect_adapt(s, form, d)));
  };
  EXPECT_EQ(adapt("(mapcar '(1 2) 'f)", Dialect::list_first), "(mapcar (quote f) (quote (1 2)))");
  EXPECT_EQ(adapt("(mapcar '(1 2) 'f)", Dialect::fn_first), "(mapcar (quote (1 2)) (quote f))");
  EXPECT_EQ(adapt("(map l 'g)", Dialect::list_first), "(map (quote g) l)");
  EXPECT_EQ(adapt("(list (mapcar (mapcar x 'f) 'g))", Dialect::list_first), "(list (mapcar (quote g) (mapcar (quote f) x)))");
  EXPECT_EQ(adapt("(quote (mapcar a b))", Dialect::list_first), "(quote (mapcar a b))");
  EXPECT_EQ(adapt("(other a b)", Dialect::list_first), "(other a b)");
  EXPECT_EQ(adapt("(mapcar a)", Dialect::list_first), "(mapcar a)");
}

std::string run_with_driver(std::string_view file, Dialect dialect) {
  DriverOptions options;
  options.dialect = dialect;
  std::ostringstream out;
  std::ostringstream err;
  Driver driver(options, out, err);
  EXPECT_TRUE(driver.run_text(testing::read_file(file), SourceMode::rlisp)) << out.str();
  return out.str();
}

TEST(Dialect, ProgramBehavesTheSameInEitherOrder) {
  const std::string fn_first = run_with_driver("tests/dialect/mapcar_fn.red", Dialect::fn_first);
  const std::string list_first = run_with_driver("tests/dialect/mapcar_list.red", Dialect::list_first);
  EXPECT_EQ(fn_first, list_first);
  EXPECT_EQ(fn_first, "(1 4 9 16)\n((4 16) (9 81))\n(a b)\n(b)\nnil\n3\n");
}

}  // namespace
}  // namespace pkrn
