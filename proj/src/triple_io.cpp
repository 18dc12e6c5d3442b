#include "brainschema/triple_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "brainschema/errors.hpp"

namespace brainschema {

std::string format_double(double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw FormatError(0, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

void write_triples(std::ostream& out, std::span<const Triple> triples) {
  for (const auto& t : triples) {
    out << t.row << '\t' << t.col << '\t' << format_double(t.weight) << '\n';
  }
}

std::vector<Triple> read_triples(std::istream& in) {
  std::vector<Triple> triples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const std::size_t a = line.find('\t');
    const std::size_t b = a == std::string::npos ? a : line.find('\t', a + 1);
    if (b == std::string::npos || line.find('\t', b + 1) != std::string::npos) {
      throw FormatError(line_no, "expected exactly 3 tab-separated fields");
    }
    Triple t{line.substr(0, a), line.substr(a + 1, b - a - 1), 0.0};
    try {
      t.weight = parse_double(std::string_view(line).substr(b + 1));
    } catch (const FormatError&) {
      throw FormatError(line_no, "bad weight '" + line.substr(b + 1) + "'");
    }
    triples.push_back(std::move(t));
  }
  return triples;
}

}  // namespace brainschema
