#pragma once

#include "relock/circuit.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace relock {

/// Parse failure with the offending 1-based line number.
class ParseError : public Error {
      public:
	ParseError(size_t line, const std::string &what)
	    : Error("line " + std::to_string(line) + ": " + what), line_(line)
	{
	}
	size_t line() const { return line_; }

      private:
	size_t line_;
};

/// Parses ISCAS/MCNC `.bench` text: `INPUT(n)`, `OUTPUT(n)`,
/// `n = GATE(a, b, ...)` and `#` comments. Keywords and gate names are
/// case-insensitive, multi-input gates are accepted, forward references are
/// resolved in a second pass. Sequential elements (DFF and friends) are
/// rejected: the toolkit is combinational only.
Circuit parse_bench(std::string_view text);
Circuit parse_bench_file(const std::filesystem::path &path);

/// Serializes back to `.bench`. Parsing the result yields a structurally
/// identical circuit (same names, types and fan-in order).
std::string write_bench(const Circuit &c);
void write_bench_file(const Circuit &c, const std::filesystem::path &path);

} // namespace relock
