#include "isopyc/snapshot.hpp"

#include "isopyc/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; big-endian hosts need byte swaps");

namespace isopyc {

namespace {

constexpr char kMagic[7] = {'I', 'S', 'O', 'P', 'Y', 'C', '1'};

template <typename T>
void put(std::string& buf, const T& v) {
    const char* p = reinterpret_cast<const char*>(&v);
    buf.append(p, sizeof(T));
}

template <typename T>
T take(const std::string& buf, std::size_t& off, const std::string& what) {
    if (off + sizeof(T) > buf.size())
        throw FormatMismatch("snapshot truncated reading " + what + ": expected " +
                             std::to_string(off + sizeof(T)) + " bytes, found " +
                             std::to_string(buf.size()));
    T v;
    std::memcpy(&v, buf.data() + off, sizeof(T));
    off += sizeof(T);
    return v;
}

} // namespace

void write_snapshot(const std::string& path, const Snapshot& snap) {
    std::string buf;
    buf.append(kMagic, sizeof(kMagic));
    put(buf, snap.version);
    put(buf, snap.Nx);
    put(buf, snap.Nvert);
    put(buf, snap.L);
    put(buf, snap.d);
    put(buf, snap.eps);
    put(buf, snap.mu);
    put(buf, snap.t);
    put(buf, static_cast<uint8_t>(snap.coord));
    put(buf, static_cast<uint32_t>(snap.fields.size()));
    const std::size_t nx = snap.d == 1 ? snap.Nx : static_cast<std::size_t>(snap.Nx) * snap.Nx;
    for (const auto& [name, field] : snap.fields) {
        if (field.size() != static_cast<std::size_t>(snap.Nvert) * nx)
            throw IOFailure("snapshot field '" + name + "' size does not match header dims");
        put(buf, static_cast<uint32_t>(name.size()));
        buf.append(name);
        buf.append(reinterpret_cast<const char*>(field.a.data()), field.size() * sizeof(double));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IOFailure("cannot open snapshot for writing: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IOFailure("short write to snapshot: " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOFailure("cannot open snapshot: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::size_t off = 0;
    if (buf.size() < sizeof(kMagic) || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
        throw FormatMismatch("snapshot magic mismatch: not an ISOPYC1 file");
    off = sizeof(kMagic);

    Snapshot s;
    s.version = take<uint32_t>(buf, off, "version");
    if (s.version != 1)
        throw FormatMismatch("snapshot version " + std::to_string(s.version) +
                             " not supported (expected 1)");
    s.Nx = take<uint32_t>(buf, off, "Nx");
    s.Nvert = take<uint32_t>(buf, off, "Nvert");
    s.L = take<double>(buf, off, "L");
    s.d = take<uint32_t>(buf, off, "d");
    s.eps = take<double>(buf, off, "eps");
    s.mu = take<double>(buf, off, "mu");
    s.t = take<double>(buf, off, "t");
    s.coord = static_cast<CoordTag>(take<uint8_t>(buf, off, "coord"));
    const uint32_t nfields = take<uint32_t>(buf, off, "field_count");
    const std::size_t nx = s.d == 1 ? s.Nx : static_cast<std::size_t>(s.Nx) * s.Nx;
    const std::size_t payload = static_cast<std::size_t>(s.Nvert) * nx;
    for (uint32_t k = 0; k < nfields; ++k) {
        const uint32_t len = take<uint32_t>(buf, off, "field name length");
        if (off + len > buf.size()) throw FormatMismatch("snapshot truncated in field name");
        std::string name(buf.data() + off, len);
        off += len;
        const std::size_t bytes = payload * sizeof(double);
        if (off + bytes > buf.size())
            throw FormatMismatch("snapshot truncated in field '" + name + "': expected " +
                                 std::to_string(off + bytes) + " bytes, found " +
                                 std::to_string(buf.size()));
        Field f(static_cast<int>(s.Nvert), static_cast<int>(nx));
        std::memcpy(f.a.data(), buf.data() + off, bytes);
        off += bytes;
        s.fields.emplace_back(std::move(name), std::move(f));
    }
    if (off != buf.size())
        throw FormatMismatch("snapshot has " + std::to_string(buf.size() - off) +
                             " trailing bytes past the declared payload");
    return s;
}

} // namespace isopyc
