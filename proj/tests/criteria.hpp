#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pkrn/session.hpp"

namespace pkrn::criteria {

struct Result {
  bool pass = false;
  std::string detail;
};

Result legendre_listing();     // 1
Result bignum_oracle();        // 2
Result engine_equivalence();   // 3
Result image_round_trip();     // 4
Result collector_soundness();  // 5
Result native_override();      // 6
Result read_print_parse();     // 7
Result df_numeric();           // 8

struct Criterion {
  int number;
  const char* name;
  std::function<Result()> check;
};

const std::vector<Criterion>& all();

// Text of every symbol's value, function, property and flag cells, one line
// per symbol, with compiled functions followed by their disassembly.
std::string symbol_cells(Session& s);

// Fixed program whose session is saved as the golden image.
const char* golden_image_program();

// Executable that answers `--dump-cells IMAGE`; enables the fresh-process
// part of the image check.
void set_self_path(std::string path);

}  // namespace pkrn::criteria
