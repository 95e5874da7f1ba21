#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "pkrn/session.hpp"

namespace pkrn {

inline constexpr std::uint32_t kImageVersion = 1;

// Header flag bits.
inline constexpr std::uint32_t kImageAlgebraic = 1;

/// Serializes the symbol table and everything reachable from it. Two saves of
/// an unchanged session produce identical bytes.
std::vector<std::uint8_t> save_image(const Session& session);

/// Builds a fresh session from an image. Throws ImageError naming the defect
/// and its byte offset; no session is returned on failure.
std::unique_ptr<Session> load_image(std::span<const std::uint8_t> bytes, SessionConfig config = {});

}  // namespace pkrn
