#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cantor {

// Finite binary strings are std::string over {'0','1'}; the empty string is rendered "-".
using BitString = std::string;

inline bool is_bitstring(std::string_view s) {
    for (char c : s)
        if (c != '0' && c != '1') return false;
    return true;
}

inline std::string render_bits(std::string_view s) { return s.empty() ? std::string("-") : std::string(s); }

inline BitString parse_bits(std::string_view s) {
    if (s == "-") return {};
    if (s.empty() || !is_bitstring(s)) throw std::invalid_argument("bad bit string: " + std::string(s));
    return BitString(s);
}

inline bool is_prefix(std::string_view p, std::string_view s) {
    return p.size() <= s.size() && s.compare(0, p.size(), p) == 0;
}

inline bool comparable(std::string_view a, std::string_view b) { return is_prefix(a, b) || is_prefix(b, a); }

inline BitString parent(std::string_view s) { return BitString(s.substr(0, s.empty() ? 0 : s.size() - 1)); }

// The k-th string of length n in lexicographic order.
inline BitString nth_string(std::uint64_t k, std::size_t n) {
    BitString s(n, '0');
    for (std::size_t i = 0; i < n; ++i)
        if ((k >> (n - 1 - i)) & 1u) s[i] = '1';
    return s;
}

inline std::uint64_t string_index(std::string_view s) {
    std::uint64_t k = 0;
    for (char c : s) k = (k << 1) | static_cast<std::uint64_t>(c == '1');
    return k;
}

inline std::vector<BitString> all_strings(std::size_t n) {
    if (n >= 63) throw std::length_error("all_strings: length too large");
    std::vector<BitString> out;
    out.reserve(std::size_t{1} << n);
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << n); ++k) out.push_back(nth_string(k, n));
    return out;
}

// Length-then-lex order used by all file formats.
inline bool shortlex_less(std::string_view a, std::string_view b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
}

inline BitString repeat_bit(char b, std::size_t n) { return BitString(n, b); }

}  // namespace cantor
