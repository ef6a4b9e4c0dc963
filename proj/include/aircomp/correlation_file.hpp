#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "aircomp/channel.hpp"

namespace aircomp {

// Text format, UTF-8:
//
//   aircomp-corr v1 K=<k> M=<m> rkind=<kind>
//   A <rows> <cols>
//   <rows lines of <cols> space-separated decimals>
//   B <rows> <cols>
//   <rows lines ...>
//
// Blank lines are ignored. Any dimension mismatch is reported with its line.

CorrelationModel parse_correlation_model(std::istream& in, const std::string& source = "<input>");
CorrelationModel read_correlation_model(const std::filesystem::path& path);

/// Writes A and B of `model` (materialized if structured) with round-trip precision.
void write_correlation_model(const CorrelationModel& model, std::ostream& out);
void write_correlation_model(const CorrelationModel& model, const std::filesystem::path& path);

}  // namespace aircomp
