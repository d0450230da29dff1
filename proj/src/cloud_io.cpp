#include "eandt/cloud_io.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace eandt {

namespace {

constexpr char kCloudMagic[8] = {'E', 'A', 'C', 'L', 'O', 'U', 'D', '1'};

// Little-endian primitives over an iostream. Serialization must be
// bit-exact across runs, so every field goes through these.
template <typename T>
void put(std::ostream& os, T value) {
    static_assert(std::is_arithmetic_v<T>);
    using U = std::conditional_t<
        sizeof(T) == 8, std::uint64_t,
        std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
    U bits = std::bit_cast<U>(value);
    char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i)
        buf[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    os.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& is, const char* what) {
    char buf[sizeof(T)];
    if (!is.read(buf, sizeof(T)))
        throw DataError(std::string("truncated cloud file reading ") + what);
    using U = std::conditional_t<
        sizeof(T) == 8, std::uint64_t,
        std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        bits |= static_cast<U>(static_cast<unsigned char>(buf[i])) << (8 * i);
    return std::bit_cast<T>(bits);
}

LabeledCloud load_binary(std::istream& is) {
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kCloudMagic, 8) != 0)
        throw DataError("not a cloud file (bad magic)");
    LabeledCloud cloud;
    const auto num_classes = get<std::uint32_t>(is, "class count");
    if (num_classes > 4096) throw DataError("implausible class count");
    for (std::uint32_t c = 0; c < num_classes; ++c) {
        const auto len = get<std::uint32_t>(is, "class name length");
        if (len > 4096) throw DataError("implausible class name length");
        std::string name(len, '\0');
        if (!is.read(name.data(), len))
            throw DataError("truncated cloud file reading class name");
        cloud.class_names.push_back(std::move(name));
    }
    const auto n = get<std::uint64_t>(is, "point count");
    cloud.positions.reserve(n);
    cloud.intensities.reserve(n);
    cloud.probs.reserve(n * num_classes);
    for (std::uint64_t i = 0; i < n; ++i) {
        Eigen::Vector3d p;
        p.x() = get<double>(is, "position");
        p.y() = get<double>(is, "position");
        p.z() = get<double>(is, "position");
        cloud.positions.push_back(p);
        cloud.intensities.push_back(get<float>(is, "intensity"));
        for (std::uint32_t c = 0; c < num_classes; ++c)
            cloud.probs.push_back(get<float>(is, "probability"));
    }
    return cloud;
}

void save_binary(const LabeledCloud& cloud, std::ostream& os) {
    os.write(kCloudMagic, 8);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(cloud.num_classes()));
    for (const auto& name : cloud.class_names) {
        put<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
    }
    put<std::uint64_t>(os, cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        put<double>(os, cloud.positions[i].x());
        put<double>(os, cloud.positions[i].y());
        put<double>(os, cloud.positions[i].z());
        put<float>(os, cloud.intensities[i]);
        for (float p : cloud.probs_of(i)) put<float>(os, p);
    }
}

LabeledCloud load_text(std::istream& is) {
    LabeledCloud cloud;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::vector<float> row;
    while (std::getline(is, line)) {
        ++line_no;
        // Strip comments and skip blank lines.
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (!have_header) {
            if (first != "classes:")
                throw DataError("line " + std::to_string(line_no) +
                                ": expected `classes:` header");
            std::string name;
            while (ls >> name) cloud.class_names.push_back(name);
            if (cloud.class_names.empty())
                throw DataError("line " + std::to_string(line_no) +
                                ": header lists no classes");
            have_header = true;
            continue;
        }
        ls.clear();
        ls.seekg(0);
        Eigen::Vector3d p;
        float intensity;
        if (!(ls >> p.x() >> p.y() >> p.z() >> intensity))
            throw DataError("line " + std::to_string(line_no) +
                            ": malformed point row");
        row.clear();
        float v;
        while (ls >> v) row.push_back(v);
        if (row.size() != cloud.num_classes())
            throw DataError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(cloud.num_classes()) +
                            " probabilities, got " +
                            std::to_string(row.size()));
        cloud.push_point(p, intensity, row);
    }
    if (!have_header && !cloud.empty())
        throw DataError("missing `classes:` header");
    return cloud;
}

void save_text(const LabeledCloud& cloud, std::ostream& os) {
    os << "classes:";
    for (const auto& name : cloud.class_names) os << ' ' << name;
    os << '\n';
    os.precision(17);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        os << cloud.positions[i].x() << ' ' << cloud.positions[i].y() << ' '
           << cloud.positions[i].z() << ' ' << cloud.intensities[i];
        for (float p : cloud.probs_of(i)) os << ' ' << p;
        os << '\n';
    }
}

}  // namespace

CloudFormat cloud_format_from_path(const std::string& path) {
    auto dot = path.rfind('.');
    if (dot != std::string::npos) {
        const std::string ext = path.substr(dot);
        if (ext == ".txt" || ext == ".xyz" || ext == ".xyzilp")
            return CloudFormat::text_xyzilp;
    }
    return CloudFormat::binary_native;
}

LabeledCloud load_cloud(const std::string& path, CloudFormat format) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open cloud file: " + path);
    LabeledCloud cloud = format == CloudFormat::binary_native ? load_binary(is)
                                                              : load_text(is);
    cloud.validate();
    return cloud;
}

void save_cloud(const LabeledCloud& cloud, const std::string& path,
                CloudFormat format) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open output file: " + path);
    if (format == CloudFormat::binary_native)
        save_binary(cloud, os);
    else
        save_text(cloud, os);
    if (!os) throw DataError("write failed: " + path);
}

LabeledCloud load_cloud(const std::string& path) {
    return load_cloud(path, cloud_format_from_path(path));
}

void save_cloud(const LabeledCloud& cloud, const std::string& path) {
    save_cloud(cloud, path, cloud_format_from_path(path));
}

}  // namespace eandt
