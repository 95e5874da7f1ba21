#include "pkrn/driver.hpp"

#include <functional>
#include <ostream>

#include "pkrn/algebra.hpp"
#include "pkrn/bytecode.hpp"
#include "pkrn/errors.hpp"
#include "pkrn/image.hpp"
#include "pkrn/platform.hpp"
#include "pkrn/rlisp.hpp"
#include "pkrn/sexpr.hpp"

namespace pkrn {

namespace {

using Source = std::function<std::optional<std::pair<Value, bool>>()>;

Source make_source(Session& s, std::string_view text, SourceMode mode, Dialect dialect, bool eof_terminates) {
  if (mode == SourceMode::lisp) {
    auto reader = std::make_shared<Reader>(s.heap(), text);
    return [reader]() -> std::optional<std::pair<Value, bool>> {
      auto form = reader->next();
      if (!form) return std::nullopt;
      return std::make_pair(*form, true);
    };
  }
  auto parser = std::make_shared<RlispParser>(s, text, dialect, eof_terminates);
  return [parser]() -> std::optional<std::pair<Value, bool>> {
    auto stmt = parser->next();
    if (!stmt) return std::nullopt;
    return std::make_pair(stmt->form, stmt->echo);
  };
}

// True when `text` ends inside an unfinished statement.
bool incomplete(Session& s, std::string_view text, SourceMode mode) {
  try {
    RootScope roots(s.heap().stack());
    Source next = make_source(s, text, mode, Dialect::fn_first, false);
    while (auto stmt = next()) roots.push(stmt->first);
  } catch (const ParseError& e) {
    return e.incomplete();
  }
  return false;
}

}  // namespace

SourceMode mode_for_file(std::string_view path, SourceMode fallback) {
  const auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() && path.substr(path.size() - suffix.size()) == suffix;
  };
  if (ends_with(".lsp")) return SourceMode::lisp;
  if (ends_with(".red")) return SourceMode::rlisp;
  return fallback;
}

Driver::Driver(DriverOptions options, std::ostream& out, std::ostream& err)
    : options_(std::move(options)), out_(out), err_(err) {}

Driver::~Driver() = default;

bool Driver::start() {
  std::vector<Engine> engines;
  switch (options_.engine) {
    case EngineChoice::tree:
      engines = {Engine::tree};
      break;
    case EngineChoice::byte:
      engines = {Engine::bytecode};
      break;
    case EngineChoice::diff:
      engines = {Engine::tree, Engine::bytecode};
      break;
  }
  std::optional<std::vector<std::uint8_t>> image;
  if (options_.image_in) {
    try {
      image = platform::read_bytes(*options_.image_in);
    } catch (const std::exception& e) {
      err_ << "pkrn: " << e.what() << "\n";
      return false;
    }
  }
  for (Engine engine : engines) {
    SessionConfig config;
    config.heap.initial_bytes = options_.heap_bytes;
    config.heap.cap_bytes = options_.heap_cap;
    config.heap.clock = platform::monotonic_ns;
    config.engine = engine;
    config.read_line = platform::read_console_line;
    try {
      sessions_.push_back(image ? load_image(*image, std::move(config)) : std::make_unique<Session>(std::move(config)));
    } catch (const std::exception& e) {
      err_ << "pkrn: cannot load image " << *options_.image_in << ": " << e.what() << "\n";
      return false;
    }
  }
  return true;
}

Driver::Outcome Driver::execute(Session& s, Value form, bool echo, SourceMode mode) {
  s.set_mode(mode == SourceMode::rlisp ? EvalMode::algebraic : EvalMode::symbolic);
  RootScope roots(s.heap().stack());
  roots.push(form);
  try {
    Value v = roots.push(s.run(form));
    std::string text = s.take_output();
    if (echo) text += (mode == SourceMode::rlisp ? render_value(s, v) : s.print(v)) + "\n";
    return {text, false};
  } catch (const std::exception& e) {
    return {s.take_output() + "***** " + e.what() + "\n", true};
  }
}

bool Driver::run_text(std::string_view text, SourceMode mode) {
  if (sessions_.empty() && !start()) return false;
  std::vector<Source> sources;
  for (auto& s : sessions_) sources.push_back(make_source(*s, text, mode, options_.dialect, true));
  bool ok = true;
  for (;;) {
    std::vector<std::optional<std::pair<Value, bool>>> stmts;
    try {
      for (auto& next : sources) stmts.push_back(next());
    } catch (const ParseError& e) {
      out_ << "***** " << e.what() << "\n";
      return false;
    }
    if (!stmts.front()) return ok;

    std::vector<Outcome> outcomes;
    for (std::size_t i = 0; i < sessions_.size(); ++i) {
      outcomes.push_back(execute(*sessions_[i], stmts[i]->first, stmts[i]->second, mode));
    }
    out_ << outcomes.front().text;
    out_.flush();
    if (outcomes.front().failed) ok = false;
    for (std::size_t i = 1; i < outcomes.size(); ++i) {
      if (outcomes[i].text != outcomes.front().text) {
        ++mismatches_;
        ok = false;
        err_ << "pkrn: engine mismatch on " << sessions_.front()->print(stmts.front()->first) << "\n"
             << "  tree: " << outcomes.front().text << "  byte: " << outcomes[i].text;
      }
    }
  }
}

void Driver::repl(SourceMode mode) {
  if (sessions_.empty() && !start()) return;
  std::string buffer;
  for (;;) {
    out_ << "> ";
    out_.flush();
    auto line = platform::read_console_line();
    if (!line) break;
    buffer += *line;
    buffer += '\n';
    if (incomplete(*sessions_.front(), buffer, mode)) continue;
    run_text(buffer, mode);
    buffer.clear();
  }
  out_ << "\n";
}

bool Driver::dump_bytecode(const std::string& name) {
  Session& s = session();
  Value sym = s.intern(name);
  Value fn = s.function(sym);
  Heap& h = s.heap();
  RootScope roots(h.stack());
  if (fn.is_cons() && h.car(fn) == s.sym().lambda && h.cdr(fn).is_cons()) {
    try {
      fn = roots.push(compile_function(s, sym, h.car(h.cdr(fn)), h.cdr(h.cdr(fn))));
    } catch (const CompileError& e) {
      out_ << "***** cannot compile " << name << ": " << e.what() << "\n";
      return false;
    }
  }
  if (!is_chunk(h, fn)) {
    out_ << "***** " << name << " has no compiled or compilable definition\n";
    return false;
  }
  out_ << disassemble_all(h, fn);
  return true;
}

bool Driver::save_image(const std::string& path) {
  try {
    platform::write_bytes(path, pkrn::save_image(session()));
    return true;
  } catch (const std::exception& e) {
    err_ << "pkrn: " << e.what() << "\n";
    return false;
  }
}

int Driver::run() {
  if (!start()) return 1;
  bool ok = true;
  const SourceMode fallback = options_.mode.value_or(SourceMode::rlisp);
  for (const std::string& path : options_.files) {
    std::string text;
    try {
      text = platform::read_text(path);
    } catch (const std::exception& e) {
      err_ << "pkrn: " << e.what() << "\n";
      ok = false;
      continue;
    }
    ok &= run_text(text, options_.mode ? *options_.mode : mode_for_file(path, fallback));
  }
  for (const std::string& expr : options_.evals) ok &= run_text(expr, fallback);
  if (options_.files.empty() && options_.evals.empty() && !options_.dump_bytecode) repl(fallback);
  if (options_.dump_bytecode) ok &= dump_bytecode(*options_.dump_bytecode);
  if (options_.image_out) ok &= save_image(*options_.image_out);
  out_.flush();
  return ok ? 0 : 1;
}

}  // namespace pkrn
