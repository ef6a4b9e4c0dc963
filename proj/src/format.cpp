#include "aircomp/format.hpp"

#include <array>
#include <charconv>
#include <string>

#include "aircomp/error.hpp"

namespace aircomp {

std::string format_double(double x) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw ValidationError("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

double parse_double_strict(std::string_view text, std::string_view what) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ValidationError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace aircomp
