#include "eandt/map_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace eandt {

namespace {

constexpr char kMapMagic[8] = {'E', 'A', 'N', 'D', 'T', '1', '\0', '\0'};
constexpr std::uint16_t kMapVersion = 1;

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
    using U = std::conditional_t<
        sizeof(T) == 8, std::uint64_t,
        std::conditional_t<sizeof(T) == 4, std::uint32_t,
                           std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                              std::uint8_t>>>;
    U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i)
        out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xff));
}

struct Reader {
    const std::vector<std::uint8_t>& bytes;
    std::size_t pos = 0;

    template <typename T>
    T get(const char* what) {
        if (pos + sizeof(T) > bytes.size())
            throw DataError(std::string("truncated map file reading ") + what);
        using U = std::conditional_t<
            sizeof(T) == 8, std::uint64_t,
            std::conditional_t<sizeof(T) == 4, std::uint32_t,
                               std::conditional_t<sizeof(T) == 2,
                                                  std::uint16_t,
                                                  std::uint8_t>>>;
        U bits = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            bits |= static_cast<U>(bytes[pos + i]) << (8 * i);
        pos += sizeof(T);
        return std::bit_cast<T>(bits);
    }
};

}  // namespace

std::vector<std::uint8_t> serialize_map(const NdtMap& map) {
    std::vector<std::uint8_t> out;
    out.reserve(8 + 2 + 1 + 8 + 8 + 4 + map.size() * kCellRecordBytes);
    out.insert(out.end(), kMapMagic, kMapMagic + 8);
    put<std::uint16_t>(out, kMapVersion);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(map.method()));
    put<double>(out, map.cell_size());
    put<std::uint64_t>(out, map.seed());
    put<std::uint32_t>(out, static_cast<std::uint32_t>(map.size()));
    for (const NdtCell& cell : map.cells()) {
        put<std::uint8_t>(out, static_cast<std::uint8_t>(cell.label));
        put<std::uint32_t>(out, cell.count);
        put<double>(out, cell.sum.x());
        put<double>(out, cell.sum.y());
        put<double>(out, cell.sum.z());
        for (double v : cell.cov_upper) put<double>(out, v);
    }
    return out;
}

NdtMap deserialize_map(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kMapMagic, 8) != 0)
        throw DataError("not a map file (bad magic)");
    Reader r{bytes, 8};
    const auto version = r.get<std::uint16_t>("version");
    if (version != kMapVersion)
        throw DataError("unsupported map version " + std::to_string(version));
    const auto method_code = r.get<std::uint8_t>("method");
    if (method_code > 1)
        throw DataError("unknown map method code " +
                        std::to_string(method_code));
    const auto cell_size = r.get<double>("cell size");
    if (!(cell_size > 0.0) || !std::isfinite(cell_size))
        throw DataError("invalid cell size in map header");
    const auto seed = r.get<std::uint64_t>("seed");
    const auto count = r.get<std::uint32_t>("cell count");

    std::vector<NdtCell> cells;
    cells.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        NdtCell cell;
        const auto label_code = r.get<std::uint8_t>("cell label");
        if (label_code >= kNumLabels)
            throw DataError("unknown label code " +
                            std::to_string(label_code));
        cell.label = static_cast<SemanticLabel>(label_code);
        cell.count = r.get<std::uint32_t>("cell count field");
        cell.sum.x() = r.get<double>("cell sum");
        cell.sum.y() = r.get<double>("cell sum");
        cell.sum.z() = r.get<double>("cell sum");
        for (double& v : cell.cov_upper) v = r.get<double>("cell covariance");
        cells.push_back(cell);
    }
    if (r.pos != bytes.size())
        throw DataError("trailing bytes after map payload");
    return NdtMap(std::move(cells), static_cast<MapMethod>(method_code),
                  cell_size, seed);
}

void save_map(const NdtMap& map, const std::string& path) {
    const std::vector<std::uint8_t> bytes = serialize_map(map);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open output file: " + path);
    os.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
    if (!os) throw DataError("write failed: " + path);
}

NdtMap load_map(const std::string& path) {
    std::ifstream is(path, std::ios::binary | std::ios::ate);
    if (!is) throw DataError("cannot open map file: " + path);
    const std::streamsize size = is.tellg();
    is.seekg(0);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
    if (!is.read(reinterpret_cast<char*>(bytes.data()), size))
        throw DataError("read failed: " + path);
    return deserialize_map(bytes);
}

}  // namespace eandt
