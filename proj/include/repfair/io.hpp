#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "repfair/core.hpp"
#include "repfair/variable_k.hpp"

namespace repfair {

/// Malformed or inconsistent input file.
class InputError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// Instance: {"agents": [...], "items": [...], "utilities": [["4", "5/2", "-1.25"], ...]}.
// Utilities may also be plain JSON integers; output always uses canonical "p/q" strings.
Instance parse_instance(std::string_view json_text);
std::string format_instance(const Instance& inst);

// Sequence: {"rounds": [{"a1": ["o1"], "a2": ["o2"]}, ...]}. Agents missing from a round hold nothing.
Sequence parse_sequence(const Instance& inst, std::string_view json_text);
std::string format_sequence(const Instance& inst, const Sequence& seq);

// Fractional allocation: {"shares": [["1/2", "1"], ...]}, one row per agent.
FractionalAllocation parse_fraction(const Instance& inst, std::string_view json_text);
std::string format_fraction(const FractionalAllocation& x);

std::string format_lottery(const Instance& inst, const RandomizedAllocation& ra);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace repfair
