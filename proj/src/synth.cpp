#include "eandt/synth.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "eandt/rng.hpp"
#include "eandt/spatial.hpp"

namespace eandt {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

// Source classes emitted by the generator; a subset of a typical outdoor
// segmentation class list, all covered by the default merge map.
const std::vector<std::string> kSceneClasses = {
    "road",  "sidewalk",     "parking", "building",   "fence",
    "pole",  "traffic-sign", "trunk",   "vegetation", "car"};

int class_index(const char* name) {
    for (std::size_t i = 0; i < kSceneClasses.size(); ++i)
        if (kSceneClasses[i] == name) return static_cast<int>(i);
    return -1;
}

// Object kinds for substream derivation.
enum : std::uint64_t {
    kGroundStream = 0,
    kBuildingStream = 1,
    kFenceStream = 2,
    kPoleStream = 3,
    kTrunkStream = 4,
    kSignStream = 5,
    kOutlierStream = 6,
    kNoiseStream = 7,
};

struct Builder {
    const SceneSpec& spec;
    LabeledCloud cloud;
    GroundTruth* truth;
    std::vector<int> point_class;  // pre-corruption class per point

    explicit Builder(const SceneSpec& s, GroundTruth* t) : spec(s), truth(t) {
        cloud.class_names = kSceneClasses;
    }

    int add_point(const Eigen::Vector3d& p, int cls, TruePrimitive* prim) {
        const int id = static_cast<int>(cloud.size());
        cloud.positions.push_back(p);
        cloud.intensities.push_back(0.5f);
        point_class.push_back(cls);
        if (prim) prim->point_ids.push_back(id);
        return id;
    }

    TruePrimitive* new_primitive(SemanticLabel label) {
        if (!truth) return nullptr;
        truth->primitives.emplace_back();
        truth->primitives.back().label = label;
        return &truth->primitives.back();
    }
};

double ground_z(const SceneSpec::Ground& g, double x, double y) {
    return g.slope * x +
           g.wave_amp * std::sin(kTau * x / g.wave_len) *
               std::cos(kTau * y / g.wave_len);
}

void emit_ground(Builder& b, Rng rng) {
    const auto& g = b.spec.ground;
    const auto n = static_cast<std::int64_t>(
        std::llround(g.length * g.width * g.density));
    const int road = class_index("road");
    const int sidewalk = class_index("sidewalk");
    const int parking = class_index("parking");

    TruePrimitive* prim = b.new_primitive(SemanticLabel::ground);
    if (prim) {
        // Macro surface plane (undulation ignored): z = slope * x.
        const Eigen::Vector3d normal =
            Eigen::Vector3d(-g.slope, 0.0, 1.0).normalized();
        prim->plane = {normal, 0.0};
    }
    for (std::int64_t i = 0; i < n; ++i) {
        const double x = rng.uniform(-0.5 * g.length, 0.5 * g.length);
        const double y = rng.uniform(-0.5 * g.width, 0.5 * g.width);
        const double z = ground_z(g, x, y) + g.roughness * rng.normal();
        const double u = rng.uniform();
        const int cls = u < 0.7 ? road : (u < 0.9 ? sidewalk : parking);
        b.add_point({x, y, z}, cls, prim);
    }
}

void emit_wall(Builder& b, Rng& rng, const Eigen::Vector3d& origin,
               const Eigen::Vector3d& along, double length, double height,
               double density, int cls, SemanticLabel label) {
    // Rectangle spanned by `along` (unit, horizontal) and +z, based at
    // `origin`; noise along the horizontal normal.
    const Eigen::Vector3d normal(along.y(), -along.x(), 0.0);
    TruePrimitive* prim = b.new_primitive(label);
    if (prim) {
        const Eigen::Vector3d center =
            origin + 0.5 * length * along + 0.5 * height * Eigen::Vector3d::UnitZ();
        prim->plane.normal = canonical_sign(normal.normalized());
        prim->plane.d = -prim->plane.normal.dot(center);
    }
    const auto n =
        static_cast<std::int64_t>(std::llround(length * height * density));
    for (std::int64_t i = 0; i < n; ++i) {
        const double u = rng.uniform(0.0, length);
        const double v = rng.uniform(0.0, height);
        const Eigen::Vector3d p = origin + u * along +
                                  v * Eigen::Vector3d::UnitZ() +
                                  b.spec.surface_noise * rng.normal() * normal;
        b.add_point(p, cls, prim);
    }
}

void emit_building(Builder& b, const SceneSpec::Building& bd, Rng rng) {
    const int cls = class_index("building");
    const double c = std::cos(bd.yaw), s = std::sin(bd.yaw);
    const Eigen::Vector3d ex(c, s, 0.0);   // local +x, width direction
    const Eigen::Vector3d ey(-s, c, 0.0);  // local +y, depth direction
    const double base = b.spec.ground.slope * bd.center.x();
    const Eigen::Vector3d origin(bd.center.x(), bd.center.y(), base);

    const double hw = 0.5 * bd.width, hd = 0.5 * bd.depth;
    // Four walls, each its own true plane.
    emit_wall(b, rng, origin - hw * ex - hd * ey, ex, bd.width, bd.height,
              bd.density, cls, SemanticLabel::building);
    emit_wall(b, rng, origin - hw * ex + hd * ey, ex, bd.width, bd.height,
              bd.density, cls, SemanticLabel::building);
    emit_wall(b, rng, origin - hw * ex - hd * ey, ey, bd.depth, bd.height,
              bd.density, cls, SemanticLabel::building);
    emit_wall(b, rng, origin + hw * ex - hd * ey, ey, bd.depth, bd.height,
              bd.density, cls, SemanticLabel::building);
}

void emit_fence(Builder& b, const SceneSpec::Fence& f, Rng rng) {
    const int cls = class_index("fence");
    const Eigen::Vector2d d2 = f.end - f.start;
    const double length = d2.norm();
    if (length <= 0.0) return;
    // The base follows the macro slope, so the sheet is still planar: it is
    // spanned by the sheared direction and +z.
    const Eigen::Vector3d along3 =
        Eigen::Vector3d(d2.x(), d2.y(),
                        b.spec.ground.slope * d2.x()).normalized();
    const Eigen::Vector3d origin(f.start.x(), f.start.y(),
                                 b.spec.ground.slope * f.start.x());
    const double run =
        Eigen::Vector3d(d2.x(), d2.y(), b.spec.ground.slope * d2.x()).norm();
    emit_wall(b, rng, origin, along3, run, f.height, f.density, cls,
              SemanticLabel::fence);
}

void emit_cylinder(Builder& b, const SceneSpec::Cylinder& cy, Rng rng,
                   int cls, SemanticLabel label) {
    const double base = b.spec.ground.slope * cy.center.x();
    const Eigen::Vector3d foot(cy.center.x(), cy.center.y(), base);
    // Axis tilted off vertical toward the azimuth direction.
    const Eigen::Vector3d axis(
        std::sin(cy.tilt) * std::cos(cy.tilt_azimuth),
        std::sin(cy.tilt) * std::sin(cy.tilt_azimuth), std::cos(cy.tilt));
    // Radial frame perpendicular to the axis.
    const Eigen::Vector3d ref =
        std::abs(axis.z()) < 0.9 ? Eigen::Vector3d::UnitZ()
                                 : Eigen::Vector3d::UnitX();
    const Eigen::Vector3d u = axis.cross(ref).normalized();
    const Eigen::Vector3d v = axis.cross(u);

    TruePrimitive* prim = b.new_primitive(label);
    if (prim) {
        prim->planar = false;
        prim->axis_dir = canonical_sign(axis);
        prim->axis_point = foot + 0.5 * cy.height * axis;
        prim->length = cy.height;
    }
    const double area = kTau * cy.radius * cy.height;
    const auto n = static_cast<std::int64_t>(std::llround(area * cy.density));
    for (std::int64_t i = 0; i < n; ++i) {
        const double t = rng.uniform(0.0, cy.height);
        const double theta = rng.uniform(0.0, kTau);
        const double r = cy.radius + b.spec.surface_noise * rng.normal();
        const Eigen::Vector3d p =
            foot + t * axis + r * (std::cos(theta) * u + std::sin(theta) * v);
        b.add_point(p, cls, prim);
    }
}

void emit_sign(Builder& b, const SceneSpec::Sign& sg, Rng rng) {
    const int cls = class_index("traffic-sign");
    const double base = b.spec.ground.slope * sg.center.x();
    const double c = std::cos(sg.yaw), s = std::sin(sg.yaw);
    const Eigen::Vector3d along(-s, c, 0.0);
    const Eigen::Vector3d origin(sg.center.x() - 0.5 * sg.size * along.x(),
                                 sg.center.y() - 0.5 * sg.size * along.y(),
                                 base + sg.bottom);
    emit_wall(b, rng, origin, along, sg.size, sg.size, sg.density, cls,
              SemanticLabel::traffic_sign);
}

void emit_outliers(Builder& b, Rng rng) {
    if (b.spec.outlier_fraction <= 0.0 || b.cloud.empty()) return;
    const auto n = static_cast<std::int64_t>(
        std::llround(b.spec.outlier_fraction *
                     static_cast<double>(b.cloud.size())));
    if (n <= 0) return;

    Eigen::Vector3d lo = b.cloud.positions.front();
    Eigen::Vector3d hi = lo;
    for (const auto& p : b.cloud.positions) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    lo -= Eigen::Vector3d::Constant(1.0);
    hi += Eigen::Vector3d::Constant(1.0);

    // Outliers take the class of the nearest surface sample.
    KdTree tree(b.cloud.positions);
    for (std::int64_t i = 0; i < n; ++i) {
        Eigen::Vector3d p;
        for (int a = 0; a < 3; ++a) p[a] = rng.uniform(lo[a], hi[a]);
        const int nearest = tree.nearest(p, 1).front();
        b.add_point(p, b.point_class[nearest], nullptr);
    }
}

void assign_probs(Builder& b, Rng rng) {
    const std::size_t nc = kSceneClasses.size();
    b.cloud.probs.assign(b.cloud.size() * nc, 0.0f);
    for (std::size_t i = 0; i < b.cloud.size(); ++i) {
        int cls = b.point_class[i];
        if (b.spec.label_noise_fraction > 0.0 &&
            rng.uniform() < b.spec.label_noise_fraction) {
            int other = static_cast<int>(rng.uniform_index(nc - 1));
            if (other >= cls) ++other;
            cls = other;
        }
        b.cloud.probs[i * nc + cls] = 1.0f;
    }
}

}  // namespace

LabeledCloud generate_scene(const SceneSpec& spec, GroundTruth* truth) {
    Builder b(spec, truth);
    emit_ground(b, Rng(Rng::mix(spec.seed, {kGroundStream, 0})));
    for (std::size_t i = 0; i < spec.buildings.size(); ++i)
        emit_building(b, spec.buildings[i],
                      Rng(Rng::mix(spec.seed, {kBuildingStream, i})));
    for (std::size_t i = 0; i < spec.fences.size(); ++i)
        emit_fence(b, spec.fences[i],
                   Rng(Rng::mix(spec.seed, {kFenceStream, i})));
    for (std::size_t i = 0; i < spec.poles.size(); ++i)
        emit_cylinder(b, spec.poles[i],
                      Rng(Rng::mix(spec.seed, {kPoleStream, i})),
                      class_index("pole"), SemanticLabel::pole);
    for (std::size_t i = 0; i < spec.trunks.size(); ++i)
        emit_cylinder(b, spec.trunks[i],
                      Rng(Rng::mix(spec.seed, {kTrunkStream, i})),
                      class_index("trunk"), SemanticLabel::tree_trunk);
    for (std::size_t i = 0; i < spec.signs.size(); ++i)
        emit_sign(b, spec.signs[i],
                  Rng(Rng::mix(spec.seed, {kSignStream, i})));
    emit_outliers(b, Rng(Rng::mix(spec.seed, {kOutlierStream, 0})));
    assign_probs(b, Rng(Rng::mix(spec.seed, {kNoiseStream, 0})));
    return std::move(b.cloud);
}

SceneSpec mini_suburb() {
    SceneSpec spec;
    spec.seed = 20240711;
    spec.ground = {};  // 100 x 20 m defaults

    auto deg = [](double d) { return d * std::numbers::pi / 180.0; };
    spec.buildings = {
        {{-35.0, 4.5}, 9.0, 6.0, 4.0, deg(8.0), 580.0},
        {{-12.0, -4.0}, 9.0, 6.0, 4.0, deg(17.0), 580.0},
        {{12.0, 4.0}, 9.0, 6.0, 4.0, deg(-12.0), 580.0},
        {{33.0, -4.2}, 9.0, 6.0, 4.0, deg(24.0), 580.0},
    };
    spec.fences = {
        {{-30.0, -8.0}, {-2.0, -8.5}, 1.6, 890.0},
        {{5.0, 8.0}, {33.0, 8.6}, 1.6, 890.0},
    };
    for (int i = 0; i < 10; ++i) {
        SceneSpec::Cylinder pole;
        pole.center = {-45.0 + 10.0 * i, i % 2 == 0 ? 1.2 : -1.2};
        pole.radius = 0.07;
        pole.height = 3.0;
        pole.density = 550.0;
        spec.poles.push_back(pole);
    }
    const double trunk_xy[6][2] = {{-42.0, -5.0}, {-25.0, 6.0}, {-5.0, 5.5},
                                   {8.0, -6.0},   {22.0, 6.5},  {40.0, -6.0}};
    for (int i = 0; i < 6; ++i) {
        SceneSpec::Cylinder trunk;
        trunk.center = {trunk_xy[i][0], trunk_xy[i][1]};
        trunk.radius = 0.22;
        trunk.height = 3.2;
        trunk.density = 5000.0;
        trunk.tilt = deg(1.0 + i);
        trunk.tilt_azimuth = deg(60.0 * i);
        spec.trunks.push_back(trunk);
    }
    spec.signs = {
        {{-44.0, 1.9}, 0.65, 1.8, deg(10.0), 1800.0},
        {{-15.0, -2.0}, 0.65, 1.8, deg(-35.0), 1800.0},
        {{6.0, 2.2}, 0.65, 1.8, deg(55.0), 1800.0},
        {{39.0, -2.0}, 0.65, 1.8, deg(-70.0), 1800.0},
    };
    return spec;
}

namespace {

double parse_num(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("scene key `" + key + "`: not a number: " + value);
    }
}

template <typename T>
T& indexed(std::vector<T>& vec, const std::string& key,
           const std::string& index_text) {
    std::size_t used = 0;
    long index = -1;
    try {
        index = std::stol(index_text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != index_text.size() || index < 0 || index > 4096)
        throw ConfigError("scene key `" + key + "`: bad object index");
    if (static_cast<std::size_t>(index) >= vec.size())
        vec.resize(index + 1);
    return vec[index];
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

void apply_scene_key(SceneSpec& spec, const std::string& key,
                     const std::string& value) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        parts.push_back(key.substr(start, dot - start));
        if (dot == std::string::npos) break;
        start = dot + 1;
    }

    if (parts.size() == 1) {
        if (key == "scene") {
            if (value != "mini-suburb")
                throw ConfigError("unknown built-in scene: " + value);
            spec = mini_suburb();
        } else if (key == "seed") {
            spec.seed = static_cast<std::uint64_t>(parse_num(key, value));
        } else if (key == "surface_noise") {
            spec.surface_noise = parse_num(key, value);
        } else if (key == "outlier_fraction") {
            spec.outlier_fraction = parse_num(key, value);
        } else if (key == "label_noise_fraction") {
            spec.label_noise_fraction = parse_num(key, value);
        } else {
            throw ConfigError("unknown scene key: " + key);
        }
        return;
    }
    if (parts[0] == "ground" && parts.size() == 2) {
        auto& g = spec.ground;
        const std::string& f = parts[1];
        if (f == "length") g.length = parse_num(key, value);
        else if (f == "width") g.width = parse_num(key, value);
        else if (f == "density") g.density = parse_num(key, value);
        else if (f == "roughness") g.roughness = parse_num(key, value);
        else if (f == "slope") g.slope = parse_num(key, value);
        else if (f == "wave_amp") g.wave_amp = parse_num(key, value);
        else if (f == "wave_len") g.wave_len = parse_num(key, value);
        else throw ConfigError("unknown scene key: " + key);
        return;
    }
    if (parts.size() != 3) throw ConfigError("unknown scene key: " + key);
    const std::string& kind = parts[0];
    const std::string& field = parts[2];
    const double v = parse_num(key, value);
    if (kind == "building") {
        auto& o = indexed(spec.buildings, key, parts[1]);
        if (field == "x") o.center.x() = v;
        else if (field == "y") o.center.y() = v;
        else if (field == "width") o.width = v;
        else if (field == "depth") o.depth = v;
        else if (field == "height") o.height = v;
        else if (field == "yaw") o.yaw = v;
        else if (field == "density") o.density = v;
        else throw ConfigError("unknown scene key: " + key);
    } else if (kind == "fence") {
        auto& o = indexed(spec.fences, key, parts[1]);
        if (field == "x0") o.start.x() = v;
        else if (field == "y0") o.start.y() = v;
        else if (field == "x1") o.end.x() = v;
        else if (field == "y1") o.end.y() = v;
        else if (field == "height") o.height = v;
        else if (field == "density") o.density = v;
        else throw ConfigError("unknown scene key: " + key);
    } else if (kind == "pole" || kind == "trunk") {
        auto& o = indexed(kind == "pole" ? spec.poles : spec.trunks, key,
                          parts[1]);
        if (field == "x") o.center.x() = v;
        else if (field == "y") o.center.y() = v;
        else if (field == "radius") o.radius = v;
        else if (field == "height") o.height = v;
        else if (field == "density") o.density = v;
        else if (field == "tilt") o.tilt = v;
        else if (field == "tilt_azimuth") o.tilt_azimuth = v;
        else throw ConfigError("unknown scene key: " + key);
    } else if (kind == "sign") {
        auto& o = indexed(spec.signs, key, parts[1]);
        if (field == "x") o.center.x() = v;
        else if (field == "y") o.center.y() = v;
        else if (field == "size") o.size = v;
        else if (field == "bottom") o.bottom = v;
        else if (field == "yaw") o.yaw = v;
        else if (field == "density") o.density = v;
        else throw ConfigError("unknown scene key: " + key);
    } else {
        throw ConfigError("unknown scene key: " + key);
    }
}

}  // namespace

SceneSpec parse_scene_spec_text(const std::string& text) {
    SceneSpec spec;
    bool any = false;
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
            throw ConfigError("scene line " + std::to_string(line_no) +
                              ": expected `key = value`");
        try {
            apply_scene_key(spec, trim(stripped.substr(0, eq)),
                            trim(stripped.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError("scene line " + std::to_string(line_no) + ": " +
                              e.what());
        }
        any = true;
    }
    if (!any) throw ConfigError("scene spec is empty");
    return spec;
}

SceneSpec load_scene_spec(const std::string& path) {
    if (path == "mini-suburb") return mini_suburb();
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open scene spec: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_scene_spec_text(ss.str());
}

}  // namespace eandt
