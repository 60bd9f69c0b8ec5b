#include "chemolab/format.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "chemolab/error.hpp"

namespace chemolab {

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value,
                                 std::chars_format::general, 17);
  if (ec != std::errc{}) throw Error("format_real: conversion failed");
  return std::string(buf, end);
}

double parse_real(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "+inf")
    return std::numeric_limits<double>::infinity();
  if (text == "-inf" || text == "-infinity")
    return -std::numeric_limits<double>::infinity();
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last)
    throw ConfigError("not a real number: '" + text + "'");
  return value;
}

}  // namespace chemolab
