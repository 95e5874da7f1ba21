#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

// The only place that talks to the host: files, clock, console input and
// thread stacks. Everything else in the kernel is host-independent.
namespace pkrn::platform {

// Throws std::runtime_error naming the path and the cause.
std::string read_text(const std::string& path);
std::vector<std::uint8_t> read_bytes(const std::string& path);
void write_bytes(const std::string& path, std::span<const std::uint8_t> bytes);

std::uint64_t monotonic_ns();

// One line from standard input without its newline; nullopt at end of input.
std::optional<std::string> read_console_line();

inline constexpr std::size_t kDefaultStackBytes = std::size_t{1} << 30;

// Runs fn on a thread whose stack is deep enough for the evaluator's
// recursion limit and returns its result. Exceptions propagate.
int run_with_stack(const std::function<int()>& fn, std::size_t stack_bytes = kDefaultStackBytes);

}  // namespace pkrn::platform
