#include "mcmc/chain_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mcmc/errors.hpp"

namespace mcmc {
namespace {

using nlohmann::json;

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

FiniteChain parse_chain_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, line_column(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("matrix"))
    throw Error(ErrorCode::Parse, "expected an object with a \"matrix\" member");

  std::vector<std::string> labels;
  if (doc.contains("states")) {
    if (!doc["states"].is_array()) throw Error(ErrorCode::Parse, "\"states\" must be an array");
    for (const auto& s : doc["states"]) labels.push_back(s.is_string() ? s.get<std::string>() : s.dump());
  }

  const auto& rows = doc["matrix"];
  if (!rows.is_array()) throw Error(ErrorCode::Parse, "\"matrix\" must be an array of rows");
  std::vector<std::vector<double>> raw;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_array()) throw Error(ErrorCode::Parse, "matrix row " + std::to_string(r) + " is not an array");
    std::vector<double> row;
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      if (!rows[r][c].is_number())
        throw Error(ErrorCode::Parse, "matrix entry (" + std::to_string(r) + ", " + std::to_string(c) +
                                          ") is not a number");
      row.push_back(rows[r][c].get<double>());
    }
    raw.push_back(std::move(row));
  }
  return validate_chain(raw, std::move(labels));
}

FiniteChain read_chain_file(const std::filesystem::path& path) {
  return parse_chain_json(read_text(path));
}

std::string to_chain_json(const FiniteChain& chain) {
  json doc;
  doc["states"] = chain.states();
  json rows = json::array();
  for (std::size_t r = 0; r < chain.size(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < chain.size(); ++c) row.push_back(chain(r, c));
    rows.push_back(std::move(row));
  }
  doc["matrix"] = std::move(rows);
  return doc.dump() + "\n";
}

void write_chain_file(const std::filesystem::path& path, const FiniteChain& chain) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << to_chain_json(chain);
}

}  // namespace mcmc
