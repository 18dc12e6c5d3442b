#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "brainschema/generator.hpp"

namespace brainschema {

/// Tab-separated `row<TAB>col<TAB>weight`, one per line, weight as the
/// shortest decimal that round-trips.
void write_triples(std::ostream& out, std::span<const Triple> triples);

/// Skips blank lines and '#' comments. Throws FormatError with the line number.
std::vector<Triple> read_triples(std::istream& in);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);
double parse_double(std::string_view text);

}  // namespace brainschema
