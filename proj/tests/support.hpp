#pragma once

#include <string>
#include <string_view>

#include "pkrn/session.hpp"

namespace pkrn::testing {

// Evaluates every form in `text` and returns one line per form: the printed
// value, or "***** message" on error. Output written by the forms comes first.
std::string run_lisp(Session& s, std::string_view text);

// Same for rlisp statements; only echoing statements contribute a value line.
std::string run_rlisp(Session& s, std::string_view text);

// Value of the last form in `text`, printed.
std::string eval_print(Session& s, std::string_view text);

// Default configuration with the given engine.
SessionConfig with_engine(Engine e);

// Absolute path of a file in the source tree.
std::string source_path(std::string_view relative);

std::string read_file(std::string_view relative);

}  // namespace pkrn::testing
