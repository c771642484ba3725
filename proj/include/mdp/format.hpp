#pragma once

#include <cstdint>
#include <string>

namespace mdp {

// Shortest decimal text that parses back to exactly the same double
// (std::to_chars round-trip form). Infinities print as "inf"/"-inf".
std::string format_double(double v);

std::string format_int(int64_t v);

// Inverse of format_double; throws ConfigError on malformed input.
double parse_double(const std::string& s);

int64_t parse_int(const std::string& s);

uint64_t parse_uint64(const std::string& s);

}  // namespace mdp
