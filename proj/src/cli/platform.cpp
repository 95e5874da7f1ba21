#include "pkrn/platform.hpp"

#include <pthread.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <exception>
#include <fstream>
#include <iostream>
#include <iterator>
#include <stdexcept>

namespace pkrn::platform {

namespace {

[[noreturn]] void io_failure(const char* action, const std::string& path) {
  throw std::runtime_error(std::string("cannot ") + action + " " + path + ": " + std::strerror(errno));
}

struct ThreadCall {
  const std::function<int()>* fn = nullptr;
  int result = 0;
  std::exception_ptr error;
};

void* thread_main(void* arg) {
  auto* call = static_cast<ThreadCall*>(arg);
  try {
    call->result = (*call->fn)();
  } catch (...) {
    call->error = std::current_exception();
  }
  return nullptr;
}

}  // namespace

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_failure("read", path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) io_failure("read", path);
  return text;
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  const std::string text = read_text(path);
  return {text.begin(), text.end()};
}

void write_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_failure("write", path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) io_failure("write", path);
}

std::uint64_t monotonic_ns() {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now().time_since_epoch()).count());
}

std::optional<std::string> read_console_line() {
  std::string line;
  if (!std::getline(std::cin, line)) return std::nullopt;
  return line;
}

int run_with_stack(const std::function<int()>& fn, std::size_t stack_bytes) {
  ThreadCall call;
  call.fn = &fn;
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, stack_bytes);
  pthread_t thread;
  const int rc = pthread_create(&thread, &attr, thread_main, &call);
  pthread_attr_destroy(&attr);
  if (rc != 0) {
    // Fall back to the calling thread when the host refuses the stack size.
    return fn();
  }
  pthread_join(thread, nullptr);
  if (call.error) std::rethrow_exception(call.error);
  return call.result;
}

}  // namespace pkrn::platform
