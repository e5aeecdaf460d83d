#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace mcmc::io {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

/// Single-column CSV with header `x`. Blank lines and `#` comments are
/// skipped. Throws Parse with the offending line number.
std::vector<double> read_column_csv(const std::filesystem::path& path);

struct BinomialCounts {
  std::int64_t successes = 0;
  std::int64_t trials = 0;
};

/// CSV with header `successes,trials` and exactly one data row.
BinomialCounts read_binomial_csv(const std::filesystem::path& path);

struct EdgeList {
  std::size_t vertices = 0;  // one past the largest vertex id seen
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

/// Text edge list, one `u v` pair of nonnegative integers per line.
EdgeList read_edge_list(const std::filesystem::path& path);

}  // namespace mcmc::io
