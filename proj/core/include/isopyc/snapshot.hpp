#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "isopyc/field.hpp"

namespace isopyc {

enum class CoordTag : uint8_t { iso = 0, eul = 1 };

/// Binary snapshot. Layout, little-endian throughout:
///   magic "ISOPYC1" (7 bytes), version u32,
///   Nx u32, Nvert u32, L f64, d u32, eps f64, mu f64, t f64,
///   coord u8, field_count u32;
/// then per field: name_len u32, name bytes, payload Nvert*Nx^d f64,
/// vertical index outermost.
struct Snapshot {
    uint32_t version = 1;
    uint32_t Nx = 0;
    uint32_t Nvert = 0;
    double L = 0.0;
    uint32_t d = 1;
    double eps = 0.0;
    double mu = 1.0;
    double t = 0.0;
    CoordTag coord = CoordTag::iso;
    std::vector<std::pair<std::string, Field>> fields;
};

void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(const std::string& path);

} // namespace isopyc
