#include <cctype>
#include <iostream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "pkrn/driver.hpp"
#include "pkrn/platform.hpp"

namespace {

// Accepts a byte count with an optional K, M or G suffix.
std::size_t parse_size(const std::string& text) {
  std::size_t used = 0;
  const unsigned long long n = std::stoull(text, &used);
  std::size_t scale = 1;
  if (used + 1 == text.size()) {
    switch (std::toupper(static_cast<unsigned char>(text.back()))) {
      case 'K':
        scale = std::size_t{1} << 10;
        break;
      case 'M':
        scale = std::size_t{1} << 20;
        break;
      case 'G':
        scale = std::size_t{1} << 30;
        break;
      default:
        throw std::invalid_argument(text);
    }
  } else if (used != text.size()) {
    throw std::invalid_argument(text);
  }
  return static_cast<std::size_t>(n) * scale;
}

}  // namespace

int main(int argc, char** argv) {
  pkrn::DriverOptions options;
  CLI::App app{"pkrn: a small Lisp and rlisp computer-algebra kernel", "pkrn"};
  bool lisp = false;
  bool rlisp = false;
  std::string heap;
  std::string heap_cap;
  std::string engine = "tree";
  std::string image_in;
  std::string image_out;
  std::string dump;
  std::string dialect = "fn-first";
  auto* lisp_flag = app.add_flag("--lisp", lisp, "Read Lisp S-expressions");
  app.add_flag("--rlisp", rlisp, "Read rlisp statements (default)")->excludes(lisp_flag);
  app.add_option("-e", options.evals, "Evaluate EXPR (repeatable)")->type_name("EXPR");
  app.add_option("files", options.files, "Source files to run in order")->type_name("FILE");
  app.add_option("--image-save", image_out, "Write an image after running")->type_name("PATH");
  app.add_option("--image-load", image_in, "Start from an image")->type_name("PATH");
  app.add_option("--heap", heap, "Initial heap size in bytes (K/M/G suffix allowed)")->type_name("N");
  app.add_option("--heap-cap", heap_cap, "Maximum heap size in bytes")->type_name("N");
  app.add_option("--engine", engine, "Execution engine")->check(CLI::IsMember({"tree", "byte", "diff"}));
  app.add_option("--dump-bytecode", dump, "Print the bytecode of function NAME")->type_name("NAME");
  app.add_option("--dialect", dialect, "Argument order of mapcar/map in rlisp input")
      ->check(CLI::IsMember({"fn-first", "list-first"}));

  try {
    app.parse(argc, argv);
    if (!heap.empty()) options.heap_bytes = parse_size(heap);
    if (!heap_cap.empty()) options.heap_cap = parse_size(heap_cap);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "pkrn: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const std::exception&) {
    std::cerr << "pkrn: bad size for --heap or --heap-cap\n" << app.help();
    return 2;
  }
  if (lisp) options.mode = pkrn::SourceMode::lisp;
  if (rlisp) options.mode = pkrn::SourceMode::rlisp;
  options.engine = engine == "byte"   ? pkrn::EngineChoice::byte
                   : engine == "diff" ? pkrn::EngineChoice::diff
                                      : pkrn::EngineChoice::tree;
  if (dialect == "list-first") options.dialect = pkrn::Dialect::list_first;
  if (!image_in.empty()) options.image_in = image_in;
  if (!image_out.empty()) options.image_out = image_out;
  if (!dump.empty()) options.dump_bytecode = dump;

  try {
    return pkrn::platform::run_with_stack([&] {
      pkrn::Driver driver(options, std::cout, std::cerr);
      return driver.run();
    });
  } catch (const std::exception& e) {
    std::cerr << "pkrn: " << e.what() << "\n";
    return 1;
  }
}
