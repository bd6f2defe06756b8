#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace evdet::detail {

// Little-endian packing independent of host byte order.
template <typename T>
void put_le(std::string& out, T value) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<char>(u & 0xFF));
        u = static_cast<U>(u >> 8);
    }
}

template <typename T>
T get_le(std::string_view in, std::size_t offset) {
    using U = std::make_unsigned_t<T>;
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        u |= static_cast<U>(static_cast<U>(static_cast<unsigned char>(in[offset + i])) << (8 * i));
    }
    return static_cast<T>(u);
}

inline void put_f32(std::string& out, float value) {
    std::uint32_t bits = 0;
    std::memcpy(&bits, &value, sizeof bits);
    put_le(out, bits);
}

}  // namespace evdet::detail
