#pragma once

#include <cstdint>
#include <string>

namespace rltbd {

/// Shortest decimal form that parses back to the same double. Locale-free
/// and deterministic, so equal values always serialize to equal bytes.
std::string format_double(double v);

std::string format_int(std::int64_t v);

}  // namespace rltbd
