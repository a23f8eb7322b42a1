#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmoo {

inline constexpr const char* kVersion = "0.1.0";

// Hard cap for exhaustive 2^N work (state vectors, full objective tables).
inline constexpr int kMaxExhaustiveVars = 26;

// Decision vectors are bit-packed: variable i (= qubit i) is bit i of the
// integer, so basis state |x> sits at array index x with qubit 0 as the
// least-significant bit. String renderings are plain binary, MSB first.
using Bits = std::uint64_t;

// Objective vectors use the minimization convention throughout.
using ObjectiveVector = std::vector<double>;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid problem or algorithm configuration (names the violated bound).
struct ConfigError : Error {
    using Error::Error;
};

// Malformed runtime input (shape/length mismatch and the like).
struct InputError : Error {
    using Error::Error;
};

// Request exceeds an exhaustive-computation guard.
struct ResourceError : Error {
    using Error::Error;
};

// Unreadable file contents; message carries the byte offset when known.
struct ParseError : Error {
    using Error::Error;
};

// Readable file, unsupported format version.
struct FormatError : Error {
    using Error::Error;
};

std::string bits_to_string(Bits x, int n_bits);
Bits string_to_bits(const std::string& s);

// Shortest decimal form that round-trips a double (used for CSV output).
std::string format_double(double v);

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64(const std::string& s);

std::string hex64(std::uint64_t v);

}  // namespace qmoo
