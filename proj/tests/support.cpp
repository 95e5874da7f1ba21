#include "support.hpp"

#include "pkrn/algebra.hpp"
#include "pkrn/errors.hpp"
#include "pkrn/platform.hpp"
#include "pkrn/rlisp.hpp"
#include "pkrn/sexpr.hpp"

namespace pkrn::testing {

namespace {

std::string outcome(Session& s, Value form, bool echo, bool algebraic) {
  RootScope roots(s.heap().stack());
  roots.push(form);
  try {
    Value v = roots.push(s.run(form));
    std::string text = s.take_output();
    if (echo) text += (algebraic ? render_value(s, v) : s.print(v)) + "\n";
    return text;
  } catch (const std::exception& e) {
    return s.take_output() + "***** " + e.what() + "\n";
  }
}

}  // namespace

std::string run_lisp(Session& s, std::string_view text) {
  std::string out;
  Reader reader(s.heap(), text);
  while (auto form = reader.next()) out += outcome(s, *form, true, false);
  return out;
}

std::string run_rlisp(Session& s, std::string_view text) {
  const EvalMode saved = s.mode();
  s.set_mode(EvalMode::algebraic);
  std::string out;
  RlispParser parser(s, text);
  while (auto stmt = parser.next()) out += outcome(s, stmt->form, stmt->echo, true);
  s.set_mode(saved);
  return out;
}

std::string eval_print(Session& s, std::string_view text) {
  std::string last;
  Reader reader(s.heap(), text);
  while (auto form = reader.next()) {
    RootScope roots(s.heap().stack());
    roots.push(*form);
    last = s.print(s.run(*form));
  }
  return last;
}

std::string source_path(std::string_view relative) { return std::string(PKRN_SOURCE_DIR) + "/" + std::string(relative); }

std::string read_file(std::string_view relative) { return platform::read_text(source_path(relative)); }

SessionConfig with_engine(Engine e) {
  SessionConfig config;
  config.engine = e;
  return config;
}

}  // namespace pkrn::testing
