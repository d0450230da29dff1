#include "eandt/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace eandt {

std::string to_string(PrimitiveKind k) {
    switch (k) {
        case PrimitiveKind::planar: return "planar";
        case PrimitiveKind::cylindrical: return "cylindrical";
        case PrimitiveKind::ground_planar: return "ground-planar";
        case PrimitiveKind::single_planar: return "single-planar";
    }
    return "planar";
}

PrimitiveKind primitive_kind_from_string(const std::string& s) {
    if (s == "planar") return PrimitiveKind::planar;
    if (s == "cylindrical") return PrimitiveKind::cylindrical;
    if (s == "ground-planar") return PrimitiveKind::ground_planar;
    if (s == "single-planar") return PrimitiveKind::single_planar;
    throw ConfigError("unknown primitive kind: " + s);
}

PipelineConfig default_pipeline_config() {
    PipelineConfig cfg;
    auto set = [&](SemanticLabel label, double f, double g, double threshold,
                   int min_points, PrimitiveKind kind) {
        LabelConfig& lc = cfg.for_label(label);
        lc.label = label;
        lc.f = f;
        lc.g = g;
        lc.grow_threshold = threshold;
        lc.grow_min_points = min_points;
        lc.primitive = kind;
    };
    set(SemanticLabel::ground, 1.6803924146591254, 0.08305231866698243, 0.50,
        3000, PrimitiveKind::ground_planar);
    set(SemanticLabel::building, 2.7078758377808536, 0.13722034139500836,
        0.30, 10, PrimitiveKind::planar);
    set(SemanticLabel::fence, 2.2479127883095584, -0.7883008443523578, 0.30,
        10, PrimitiveKind::planar);
    set(SemanticLabel::pole, 1.6874096382321715, -0.31506643695059683, 0.30,
        10, PrimitiveKind::cylindrical);
    set(SemanticLabel::traffic_sign, 3.9231919696267386, 0.3165458127096211,
        0.30, 10, PrimitiveKind::single_planar);
    set(SemanticLabel::tree_trunk, 4.17948650640806, 0.31843996435228533,
        0.30, 10, PrimitiveKind::cylindrical);
    return cfg;
}

namespace {

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key `" + key + "`: not a number: " + value);
    }
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const std::int64_t v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key `" + key + "`: not an integer: " + value);
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key `" + key + "`: not an integer: " + value);
    }
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Label names that may prefix a dotted key.
bool is_label_key(const std::string& head, SemanticLabel* out) {
    for (SemanticLabel label : kUsedLabels) {
        if (head == to_string(label)) {
            *out = label;
            return true;
        }
    }
    return false;
}

void apply_key(ParsedConfig& cfg, const std::string& key,
               const std::string& value) {
    PipelineConfig& p = cfg.pipeline;
    const auto dot = key.find('.');
    const std::string head = dot == std::string::npos ? key : key.substr(0, dot);
    const std::string tail = dot == std::string::npos ? "" : key.substr(dot + 1);

    SemanticLabel label;
    if (is_label_key(head, &label) && !tail.empty()) {
        LabelConfig& lc = p.for_label(label);
        if (tail == "f") {
            lc.f = parse_double(key, value);
            if (lc.f <= 0.0) throw ConfigError("key `" + key + "`: f must be positive");
        } else if (tail == "g") {
            lc.g = parse_double(key, value);
        } else if (tail == "grow_threshold") {
            lc.grow_threshold = parse_double(key, value);
            if (lc.grow_threshold <= 0.0)
                throw ConfigError("key `" + key + "`: threshold must be positive");
        } else if (tail == "grow_min_points") {
            lc.grow_min_points = static_cast<int>(parse_int(key, value));
            if (lc.grow_min_points < 1)
                throw ConfigError("key `" + key + "`: min points must be >= 1");
        } else if (tail == "primitive") {
            lc.primitive = primitive_kind_from_string(value);
        } else if (head == "ground" && tail == "target_area") {
            p.ground_target_area = parse_double(key, value);
        } else if (head == "ground" && tail == "coarse_threshold") {
            p.ground_coarse_threshold = parse_double(key, value);
        } else if (head == "ground" && tail == "fine_threshold") {
            p.ground_fine_threshold = parse_double(key, value);
        } else {
            throw ConfigError("unknown config key: " + key);
        }
        return;
    }
    if (head == "class_map" && !tail.empty()) {
        cfg.merge_map[tail] = label_from_string(value);
        return;
    }
    if (head == "plane_fit" && !tail.empty()) {
        if (tail == "threshold")
            p.plane_fit.distance_threshold = parse_double(key, value);
        else if (tail == "normal_weight")
            p.plane_fit.normal_weight = parse_double(key, value);
        else if (tail == "max_iterations")
            p.plane_fit.max_iterations = static_cast<int>(parse_int(key, value));
        else if (tail == "min_inliers")
            p.plane_fit.min_inliers = static_cast<int>(parse_int(key, value));
        else if (tail == "voxel_subsample")
            p.plane_fit.voxel_subsample = parse_double(key, value);
        else if (tail == "normal_k")
            p.plane_fit.normal_k = static_cast<int>(parse_int(key, value));
        else
            throw ConfigError("unknown config key: " + key);
        return;
    }
    if (head == "kmeans" && !tail.empty()) {
        if (tail == "max_iter")
            p.kmeans.max_iter = static_cast<int>(parse_int(key, value));
        else if (tail == "tol")
            p.kmeans.tol = parse_double(key, value);
        else if (tail == "restarts")
            p.kmeans.restarts = static_cast<int>(parse_int(key, value));
        else
            throw ConfigError("unknown config key: " + key);
        return;
    }
    if (head == "preprocess" && !tail.empty()) {
        if (tail == "voxel")
            p.preprocess_voxel = parse_double(key, value);
        else if (tail == "smooth")
            p.preprocess_smooth = parse_double(key, value);
        else
            throw ConfigError("unknown config key: " + key);
        return;
    }
    if (key == "cell_size") {
        p.cell_size = parse_double(key, value);
        if (p.cell_size <= 0.0)
            throw ConfigError("cell_size must be positive");
    } else if (key == "seed") {
        p.seed = parse_u64(key, value);
    } else if (key == "min_cell_points") {
        p.min_cell_points = static_cast<int>(parse_int(key, value));
        if (p.min_cell_points < 1)
            throw ConfigError("min_cell_points must be >= 1");
    } else if (key == "threads") {
        p.threads = static_cast<int>(parse_int(key, value));
        if (p.threads < 1) throw ConfigError("threads must be >= 1");
    } else {
        throw ConfigError("unknown config key: " + key);
    }
}

}  // namespace

ParsedConfig parse_config_text(const std::string& text,
                               const ParsedConfig& base) {
    ParsedConfig cfg = base;
    std::istringstream is(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected `key = value`");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": empty key or value");
        try {
            apply_key(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(line_no) + ": " +
                              e.what());
        }
    }
    return cfg;
}

ParsedConfig load_config(const std::string& path, const ParsedConfig& base) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str(), base);
}

ParsedConfig load_config(const std::string& path) {
    return load_config(path, default_parsed_config());
}

}  // namespace eandt
