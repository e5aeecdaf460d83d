#include "mcmc/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "mcmc/errors.hpp"

namespace mcmc::io {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool skippable(const std::string& line) { return line.empty() || line.front() == '#'; }

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(line) + ": " + what);
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) fields.push_back(trim(field));
  return fields;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::vector<double> read_column_csv(const std::filesystem::path& path) {
  auto in = open(path);
  std::vector<double> values;
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (skippable(line)) continue;
    if (!header_seen) {
      header_seen = true;
      if (line == "x") continue;
    }
    double v = 0.0;
    if (!parse_number(line, v)) parse_fail(path, line_no, "expected a number, got '" + line + "'");
    values.push_back(v);
  }
  return values;
}

BinomialCounts read_binomial_csv(const std::filesystem::path& path) {
  auto in = open(path);
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::optional<BinomialCounts> counts;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (skippable(line)) continue;
    if (!header_seen) {
      header_seen = true;
      if (line == "successes,trials") continue;
    }
    if (counts) parse_fail(path, line_no, "more than one data row");
    const auto fields = split(line, ',');
    BinomialCounts c;
    if (fields.size() != 2 || !parse_number(fields[0], c.successes) || !parse_number(fields[1], c.trials))
      parse_fail(path, line_no, "expected 'successes,trials', got '" + line + "'");
    if (c.trials < 0 || c.successes < 0 || c.successes > c.trials)
      parse_fail(path, line_no, "need 0 <= successes <= trials");
    counts = c;
  }
  if (!counts) throw Error(ErrorCode::Parse, path.string() + ": no data row");
  return *counts;
}

EdgeList read_edge_list(const std::filesystem::path& path) {
  auto in = open(path);
  EdgeList list;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (skippable(line)) continue;
    std::istringstream is(line);
    std::string a;
    std::string b;
    std::string extra;
    std::size_t u = 0;
    std::size_t v = 0;
    if (!(is >> a >> b) || (is >> extra) || !parse_number(a, u) || !parse_number(b, v))
      parse_fail(path, line_no, "expected 'u v', got '" + line + "'");
    list.edges.emplace_back(u, v);
    list.vertices = std::max({list.vertices, u + 1, v + 1});
  }
  return list;
}

}  // namespace mcmc::io
