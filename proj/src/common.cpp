#include "qmoo/common.hpp"

#include <array>
#include <cstring>

namespace qmoo {

std::string bits_to_string(Bits x, int n_bits) {
    std::string s(static_cast<std::size_t>(n_bits), '0');
    for (int i = 0; i < n_bits; ++i) {
        if ((x >> i) & 1ULL) s[static_cast<std::size_t>(n_bits - 1 - i)] = '1';
    }
    return s;
}

Bits string_to_bits(const std::string& s) {
    Bits x = 0;
    for (char c : s) {
        if (c != '0' && c != '1') throw InputError("bitstring contains non-binary character");
        x = (x << 1) | static_cast<Bits>(c - '0');
    }
    return x;
}

std::string format_double(double v) {
    // %.17g always round-trips; try shorter forms first so files stay diffable.
    std::array<char, 48> buf{};
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf.data(), buf.size(), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf.data(), "%lf", &back);
        if (back == v || (v != v && back != back)) break;
    }
    return std::string(buf.data());
}

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64(const std::string& s) {
    return fnv1a64(s.data(), s.size());
}

std::string hex64(std::uint64_t v) {
    std::array<char, 20> buf{};
    std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf.data());
}

}  // namespace qmoo
