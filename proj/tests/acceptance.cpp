// Prints one PASS/FAIL line per acceptance criterion; exit status 0 only when
// all pass.
//
//   acceptance                  run every criterion
//   acceptance --dump-cells IMG print the symbol cells of an image (used by
//                               criterion 4 as the fresh process)
//   acceptance --write-golden   regenerate tests/golden/session.{img,cells}

#include <chrono>
#include <cstring>
#include <iostream>

#include "criteria.hpp"
#include "pkrn/image.hpp"
#include "pkrn/platform.hpp"
#include "support.hpp"

namespace {

int dump_cells(const char* path) {
  auto session = pkrn::load_image(pkrn::platform::read_bytes(path));
  std::cout << pkrn::criteria::symbol_cells(*session);
  return 0;
}

int write_golden() {
  pkrn::SessionConfig config;
  config.engine = pkrn::Engine::bytecode;
  pkrn::Session s(config);
  const std::string out = pkrn::testing::run_lisp(s, pkrn::criteria::golden_image_program());
  if (out.find("*****") != std::string::npos) {
    std::cerr << out;
    return 1;
  }
  const auto image = pkrn::save_image(s);
  pkrn::platform::write_bytes(pkrn::testing::source_path("tests/golden/session.img"), image);
  const std::string cells = pkrn::criteria::symbol_cells(*pkrn::load_image(image));
  pkrn::platform::write_bytes(pkrn::testing::source_path("tests/golden/session.cells"),
                              {reinterpret_cast<const std::uint8_t*>(cells.data()), cells.size()});
  std::cout << "wrote " << image.size() << " byte image\n";
  return 0;
}

int run_all() {
  bool all_pass = true;
  for (const auto& c : pkrn::criteria::all()) {
    const auto t0 = std::chrono::steady_clock::now();
    pkrn::criteria::Result r;
    try {
      r = c.check();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all_pass &= r.pass;
    std::cout << (r.pass ? "PASS" : "FAIL") << " " << c.number << " " << c.name << ": " << r.detail << " [" << secs
              << " s]\n";
    std::cout.flush();
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  return pkrn::platform::run_with_stack([&] {
    try {
      if (argc == 3 && std::strcmp(argv[1], "--dump-cells") == 0) return dump_cells(argv[2]);
      if (argc == 2 && std::strcmp(argv[1], "--write-golden") == 0) return write_golden();
      if (argc != 1) {
        std::cerr << "usage: acceptance [--dump-cells IMAGE | --write-golden]\n";
        return 2;
      }
      pkrn::criteria::set_self_path(argv[0]);
      return run_all();
    } catch (const std::exception& e) {
      std::cerr << "acceptance: " << e.what() << "\n";
      return 1;
    }
  });
}
