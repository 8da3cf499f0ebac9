#include "rltbd/csv.hpp"

#include <charconv>
#include <stdexcept>
#include <system_error>

namespace rltbd {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc{}) {
    throw std::runtime_error("format_double: conversion failed");
  }
  return std::string(buf, res.ptr);
}

std::string format_int(std::int64_t v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc{}) {
    throw std::runtime_error("format_int: conversion failed");
  }
  return std::string(buf, res.ptr);
}

}  // namespace rltbd
