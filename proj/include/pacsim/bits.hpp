#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pacsim {

// bit containers are plain byte vectors holding 0/1, index 0 = first bit on the wire
using Bits = std::vector<uint8_t>;

inline std::string format_bits(const Bits& b) {
    std::string s;
    s.reserve(b.size());
    for (uint8_t v : b) s.push_back(v ? '1' : '0');
    return s;
}

// accepts "1001" or hex with 0x prefix ("0x9" -> 1001)
inline Bits parse_bits(const std::string& s) {
    Bits out;
    if (s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0) {
        for (size_t i = 2; i < s.size(); ++i) {
            char c = s[i];
            int v;
            if (c >= '0' && c <= '9') v = c - '0';
            else if (c >= 'a' && c <= 'f') v = 10 + c - 'a';
            else if (c >= 'A' && c <= 'F') v = 10 + c - 'A';
            else throw std::invalid_argument("bad hex digit in bit string: " + s);
            for (int k = 3; k >= 0; --k) out.push_back((v >> k) & 1);
        }
        return out;
    }
    for (char c : s) {
        if (c == '0') out.push_back(0);
        else if (c == '1') out.push_back(1);
        else throw std::invalid_argument("bad bit character in bit string: " + s);
    }
    return out;
}

} // namespace pacsim
