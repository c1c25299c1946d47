#include "urnsim/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace urnsim {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc())
    throw std::runtime_error("failed to format a double");
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw std::invalid_argument("not a number: '" + token + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& token) {
  std::uint64_t v = 0;
  const char* first = token.data();
  const char* last = first + token.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw std::invalid_argument("not a nonnegative integer: '" + token + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

namespace {

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::vector<double> read_numeric_column(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::vector<double> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    if (first) {
      first = false;
      try {
        out.push_back(parse_double(line));
      } catch (const std::invalid_argument&) {
        // header line
      }
      continue;
    }
    out.push_back(parse_double(line));
  }
  return out;
}

void write_tail_csv(const std::string& path, const TailCurve& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "omega,tail_prob\n";
  for (const TailPoint& p : curve.points())
    out << format_double(p.omega) << ',' << format_double(p.prob) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path);
}

TailCurve read_tail_csv(const std::string& path, CurveSource source) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::vector<TailPoint> points;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 2)
      throw std::runtime_error(path + ": expected two columns");
    if (first) {
      first = false;
      if (cells[0] == "omega") continue;  // header
    }
    points.push_back({parse_double(cells[0]), parse_double(cells[1])});
  }
  return TailCurve(std::move(points), source);
}

}  // namespace urnsim
