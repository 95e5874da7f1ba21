#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pkrn/rlisp.hpp"
#include "pkrn/session.hpp"

namespace pkrn {

enum class SourceMode { rlisp, lisp };
enum class EngineChoice { tree, byte, diff };

struct DriverOptions {
  std::optional<SourceMode> mode;  // unset: by file suffix, rlisp otherwise
  std::vector<std::string> evals;
  std::vector<std::string> files;
  std::optional<std::string> image_in;
  std::optional<std::string> image_out;
  std::optional<std::string> dump_bytecode;
  std::size_t heap_bytes = std::size_t{8} << 20;
  std::size_t heap_cap = std::size_t{512} << 20;
  EngineChoice engine = EngineChoice::tree;
  Dialect dialect = Dialect::fn_first;  // argument order of mapcar/map in rlisp
};

// .lsp selects lisp, .red rlisp; anything else uses `fallback`.
SourceMode mode_for_file(std::string_view path, SourceMode fallback);

/// Batch and interactive front end. Evaluation output, echoed values and
/// "***** message" error lines go to `out`; driver failures go to `err`.
class Driver {
 public:
  Driver(DriverOptions options, std::ostream& out, std::ostream& err);
  ~Driver();

  // Files, then -e strings, then the bytecode dump and image save. Falls into
  // the REPL when there is nothing to run. Returns the process exit code.
  int run();

  // Evaluates every statement of `text`. Returns false if any failed.
  bool run_text(std::string_view text, SourceMode mode);

  // Reads statements with the "> " prompt until end of input.
  void repl(SourceMode mode);

  std::size_t mismatches() const { return mismatches_; }
  Session& session() { return *sessions_.front(); }

 private:
  struct Outcome {
    std::string text;
    bool failed;
  };

  bool start();
  Outcome execute(Session& s, Value form, bool echo, SourceMode mode);
  bool run_forms(std::vector<std::vector<std::pair<Value, bool>>>& forms, SourceMode mode);
  bool dump_bytecode(const std::string& name);
  bool save_image(const std::string& path);

  DriverOptions options_;
  std::ostream& out_;
  std::ostream& err_;
  std::vector<std::unique_ptr<Session>> sessions_;
  std::size_t mismatches_ = 0;
};

}  // namespace pkrn
