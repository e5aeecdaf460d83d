#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "mcmc/chain.hpp"

namespace mcmc {

/// Parses `{"states": [...], "matrix": [[...], ...]}` and validates the
/// result. Labels may be JSON strings or numbers; numbers are kept in their
/// JSON spelling. Throws Parse (with line and column) or any validate_chain
/// error.
FiniteChain parse_chain_json(std::string_view text);
FiniteChain read_chain_file(const std::filesystem::path& path);

/// Inverse of parse_chain_json; doubles are written in shortest round-trip
/// form, so re-parsing yields an identical FiniteChain.
std::string to_chain_json(const FiniteChain& chain);
void write_chain_file(const std::filesystem::path& path, const FiniteChain& chain);

}  // namespace mcmc
