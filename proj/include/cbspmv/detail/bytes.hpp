#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <type_traits>

namespace cbspmv::detail {

// Little-endian load/store independent of host byte order.

template <typename T>
    requires std::is_integral_v<T>
inline void store_le(std::uint8_t* dst, T v) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i)
        dst[i] = static_cast<std::uint8_t>(u >> (8 * i));
}

template <typename T>
    requires std::is_integral_v<T>
inline T load_le(const std::uint8_t* src) {
    using U = std::make_unsigned_t<T>;
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        u |= static_cast<U>(static_cast<U>(src[i]) << (8 * i));
    return static_cast<T>(u);
}

inline void store_f64(std::uint8_t* dst, double v) {
    store_le<std::uint64_t>(dst, std::bit_cast<std::uint64_t>(v));
}

inline double load_f64(const std::uint8_t* src) {
    return std::bit_cast<double>(load_le<std::uint64_t>(src));
}

constexpr std::uint64_t align_up(std::uint64_t n, std::uint64_t a) {
    return (n + a - 1) / a * a;
}

}  // namespace cbspmv::detail
