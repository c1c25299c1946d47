#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "urnsim/tail_curve.hpp"

namespace urnsim {

// shortest decimal form that parses back to exactly the same double
std::string format_double(double v);

// strict parsers: the whole token must be consumed
double parse_double(const std::string& token);
std::uint64_t parse_uint(const std::string& token);

std::vector<std::string> split(const std::string& line, char sep);

// Reads a one-column numeric CSV; a non-numeric first line is treated as a
// header and skipped.  Blank lines are ignored.
std::vector<double> read_numeric_column(const std::string& path);

// omega,tail_prob round trip
void write_tail_csv(const std::string& path, const TailCurve& curve);
TailCurve read_tail_csv(const std::string& path, CurveSource source);

}  // namespace urnsim
