#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "teamdims/error.hpp"

namespace teamdims {

// The four teamwork dimensions. The order below is canonical and is used for
// every serialized label vector, metric table and model head.
enum class Dimension : std::uint8_t { COD = 0, MPM = 1, CCF = 2, TES = 3 };

inline constexpr std::array<Dimension, 4> kDimensions = {
    Dimension::COD, Dimension::MPM, Dimension::CCF, Dimension::TES};

inline constexpr std::size_t kNumDimensions = 4;

inline constexpr std::string_view to_string(Dimension d) {
    switch (d) {
        case Dimension::COD: return "COD";
        case Dimension::MPM: return "MPM";
        case Dimension::CCF: return "CCF";
        case Dimension::TES: return "TES";
    }
    return "?";
}

inline Dimension dimension_from_string(std::string_view name) {
    for (Dimension d : kDimensions)
        if (to_string(d) == name) return d;
    throw validation_error("unknown dimension name: " + std::string(name));
}

// One bit per dimension; any subset (including none) is legal.
struct LabelVector {
    std::array<std::uint8_t, 4> bits{};

    std::uint8_t& operator[](Dimension d) { return bits[static_cast<std::size_t>(d)]; }
    std::uint8_t operator[](Dimension d) const { return bits[static_cast<std::size_t>(d)]; }

    bool any() const { return bits[0] || bits[1] || bits[2] || bits[3]; }

    bool operator==(const LabelVector&) const = default;

    // "0101" in canonical dimension order.
    std::string compact() const {
        std::string s(4, '0');
        for (std::size_t i = 0; i < 4; ++i) s[i] = bits[i] ? '1' : '0';
        return s;
    }
};

inline LabelVector make_labels(int cod, int mpm, int ccf, int tes) {
    LabelVector v;
    v.bits = {static_cast<std::uint8_t>(cod), static_cast<std::uint8_t>(mpm),
              static_cast<std::uint8_t>(ccf), static_cast<std::uint8_t>(tes)};
    return v;
}

} // namespace teamdims
