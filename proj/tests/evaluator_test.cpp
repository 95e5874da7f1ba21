#include <gtest/gtest.h>

#include "pkrn/errors.hpp"
#include "pkrn/session.hpp"
#include "support.hpp"

namespace pkrn {
namespace {

using testing::eval_print;
using testing::run_lisp;

class Evaluator : public ::testing::TestWithParam<Engine> {
 protected:
  Session s{testing::with_engine(GetParam())};
};

TEST_P(Evaluator, SpecialForms) {
  EXPECT_EQ(eval_print(s, "(quote (a b))"), "(a b)");
  EXPECT_EQ(eval_print(s, "(cond ((eq 1 2) 'no) ((eq 1 1) 'yes))"), "yes");
  EXPECT_EQ(eval_print(s, "(cond ((eq 1 2) 'no))"), "nil");
  EXPECT_EQ(eval_print(s, "(cond (5))"), "5");
  EXPECT_EQ(eval_print(s, "(setq v 10) (setq v (plus v 1)) v"), "11");
  EXPECT_EQ(eval_print(s, "(progn 1 2 3)"), "3");
  EXPECT_EQ(eval_print(s, "(and 1 2 3)"), "3");
  EXPECT_EQ(eval_print(s, "(and 1 nil (car 1))"), "nil");
  EXPECT_EQ(eval_print(s, "(or nil nil)"), "nil");
  EXPECT_EQ(eval_print(s, "(or nil 4 (car 1))"), "4");
  EXPECT_EQ(eval_print(s, "((lambda (x y) (list y x)) 1 2)"), "(2 1)");
  EXPECT_EQ(eval_print(s, "(lambda (x) x)"), "(lambda (x) x)");
}

TEST_P(Evaluator, DefinitionsAndRecursion) {
  EXPECT_EQ(eval_print(s, "(de fact (n) (cond ((eq n 0) 1) (t (times n (fact (difference n 1))))))"), "fact");
  EXPECT_EQ(eval_print(s, "(fact 25)"), "15511210043330985984000000");
  EXPECT_EQ(eval_print(s, "(de ack (m n) (cond ((eq m 0) (plus n 1)) ((eq n 0) (ack (difference m 1) 1))"
                          " (t (ack (difference m 1) (ack m (difference n 1))))))"
                          "(ack 2 3)"),
            "9");
}

TEST_P(Evaluator, DynamicBindingIsRestored) {
  EXPECT_EQ(eval_print(s, "(setq x 'outer) (de peek () x) ((lambda (x) (peek)) 'inner)"), "inner");
  EXPECT_EQ(eval_print(s, "x"), "outer");
  run_lisp(s, "((lambda (x) (car x)) 5)");
  EXPECT_EQ(eval_print(s, "x"), "outer");
}

TEST_P(Evaluator, ProgLoopsAndLabels) {
  EXPECT_EQ(eval_print(s, "(prog (i acc) (setq i 0) (setq acc nil) top (cond ((eq i 5) (return acc)))"
                          " (setq acc (cons i acc)) (setq i (plus i 1)) (go top))"),
            "(4 3 2 1 0)");
  EXPECT_EQ(eval_print(s, "(prog (a) (setq a 1))"), "nil");
  EXPECT_EQ(eval_print(s, "(prog () (go b) a (return 'a) b (return 'b))"), "b");
  EXPECT_EQ(eval_print(s, "(prog (v) (return v))"), "nil");
}

TEST_P(Evaluator, Errors) {
  EXPECT_EQ(run_lisp(s, "(car 5)"), "***** wrong type: expected list, got 5\n");
  EXPECT_EQ(run_lisp(s, "(nosuch 1)"), "***** undefined function: nosuch\n");
  EXPECT_EQ(run_lisp(s, "unboundvar"), "***** unbound variable: unboundvar\n");
  EXPECT_EQ(run_lisp(s, "(cons 1)"), "***** wrong number of arguments to cons: expected 2, got 1\n");
  EXPECT_EQ(run_lisp(s, "(quotient 1 0)"), "***** division by zero\n");
  EXPECT_EQ(run_lisp(s, "(prog () (go nowhere))"), "***** undefined label: nowhere\n");
  EXPECT_EQ(run_lisp(s, "(return 1)"), "***** go or return outside prog\n");
  EXPECT_EQ(run_lisp(s, "(error \"custom\" 42)"), "***** custom 42\n");
}

TEST_P(Evaluator, DepthLimitIsAnError) {
  run_lisp(s, "(de deep (n) (cond ((eq n 0) 0) (t (plus 1 (deep (difference n 1))))))");
  EXPECT_EQ(eval_print(s, "(deep 5000)"), "5000");
  const std::string out = run_lisp(s, "(deep 20000)");
  EXPECT_EQ(out, "***** stack overflow: more than 10000 nested calls\n");
  EXPECT_EQ(eval_print(s, "(deep 10)"), "10");
}

TEST_P(Evaluator, Builtins) {
  EXPECT_EQ(eval_print(s, "(list (atom 'a) (atom '(a)) (null nil) (numberp 1.5) (numberp 'x))"), "(t nil t t nil)");
  EXPECT_EQ(eval_print(s, "(append '(1 2) '(3) nil '(4))"), "(1 2 3 4)");
  EXPECT_EQ(eval_print(s, "(reverse '(1 2 3))"), "(3 2 1)");
  EXPECT_EQ(eval_print(s, "(length '(a b c d))"), "4");
  EXPECT_EQ(eval_print(s, "(mapcar 'car '((1) (2) (3)))"), "(1 2 3)");
  EXPECT_EQ(eval_print(s, "(put 'k 'p 1) (put 'k 'p 2) (get 'k 'p)"), "2");
  EXPECT_EQ(eval_print(s, "(get 'k 'missing)"), "nil");
  EXPECT_EQ(eval_print(s, "(flag '(k j) 'on) (list (flagp 'k 'on) (flagp 'j 'on) (flagp 'k 'off))"), "(t t nil)");
  EXPECT_EQ(eval_print(s, "(list (lessp 1 2) (greaterp 1 2) (leq 2 2) (geq 1 2) (eqn 3 3.0))"), "(t nil t nil t)");
  EXPECT_EQ(eval_print(s, "(list (remainder -7 2) (quotient -7 2) (minus 3) (times 1.5 2))"), "(-1 -3 -3 3.0)");
  EXPECT_EQ(eval_print(s, "(equal '(1 (2 \"x\")) (list 1 (list 2 \"x\")))"), "t");
}

TEST_P(Evaluator, PrintAndReadValues) {
  EXPECT_EQ(run_lisp(s, "(print-value '(1 \"two\"))"), "(1 \"two\")\n(1 \"two\")\n");
  SessionConfig config = testing::with_engine(GetParam());
  std::vector<std::string> lines{"(a b) 7", "\"s\""};
  config.read_line = [&lines]() -> std::optional<std::string> {
    if (lines.empty()) return std::nullopt;
    std::string l = lines.front();
    lines.erase(lines.begin());
    return l;
  };
  Session reader(config);
  EXPECT_EQ(eval_print(reader, "(list (read-value) (read-value) (read-value) (read-value))"), "((a b) 7 \"s\" $eof$)");
}

TEST_P(Evaluator, AlgebraicModeTreatsUnboundSymbolsAsKernels) {
  EXPECT_EQ(run_lisp(s, "zz"), "***** unbound variable: zz\n");
  s.set_mode(EvalMode::algebraic);
  EXPECT_EQ(eval_print(s, "zz"), "zz");
}

INSTANTIATE_TEST_SUITE_P(Engines, Evaluator, ::testing::Values(Engine::tree, Engine::bytecode),
                         [](const auto& info) { return info.param == Engine::tree ? "tree" : "bytecode"; });

TEST(Session, DefineBuiltinReplacesInPlace) {
  Session s;
  const auto before = s.find_builtin("car");
  ASSERT_TRUE(before.has_value());
  s.define_builtin("car", [](Session&, std::span<const Value>) { return Value::fixnum(99); }, 1, 1);
  EXPECT_EQ(s.find_builtin("car"), before);
  EXPECT_EQ(eval_print(s, "(car '(1))"), "99");
}

}  // namespace
}  // namespace pkrn
