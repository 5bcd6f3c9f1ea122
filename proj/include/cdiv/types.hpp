#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cdiv {

using Bytes = std::vector<std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;
using Address = std::array<std::uint8_t, 20>;
using PublicKey = std::array<std::uint8_t, 32>;

// Smallest indivisible reward denomination.
using RewardUnits = std::int64_t;

using ImplId = std::string;

/// Fraction count / total of some population. A zero total reads as share 0.
struct Share {
    std::uint64_t count = 0;
    std::uint64_t total = 0;

    [[nodiscard]] double value() const noexcept {
        return total == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(total);
    }

    // Compares count/total against num/den exactly.
    [[nodiscard]] std::strong_ordering compare(std::uint64_t num, std::uint64_t den) const noexcept {
        const unsigned __int128 lhs = static_cast<unsigned __int128>(total == 0 ? 0 : count) * den;
        const unsigned __int128 rhs = static_cast<unsigned __int128>(num) * (total == 0 ? 1 : total);
        return lhs <=> rhs;
    }
};

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::string to_hex(std::span<const std::uint8_t> bytes);
Bytes from_hex(std::string_view hex);

template <std::size_t N>
std::array<std::uint8_t, N> array_from_hex(std::string_view hex) {
    const Bytes raw = from_hex(hex);
    if (raw.size() != N) {
        throw Error("hex string has " + std::to_string(raw.size()) + " bytes, expected " + std::to_string(N));
    }
    std::array<std::uint8_t, N> out{};
    std::copy(raw.begin(), raw.end(), out.begin());
    return out;
}

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

Digest sha256(std::span<const std::uint8_t> data);

}  // namespace cdiv
