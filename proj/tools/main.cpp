// eandt: semantic NDT map compression toolkit, command-line front end.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eandt/cloud_io.hpp"
#include "eandt/config.hpp"
#include "eandt/eval.hpp"
#include "eandt/filters.hpp"
#include "eandt/map_io.hpp"
#include "eandt/ndt_map.hpp"
#include "eandt/pipeline.hpp"
#include "eandt/synth.hpp"
#include "eandt/types.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

#ifndef EANDT_VERSION
#define EANDT_VERSION "0.0.0"
#endif

// ---------------------------------------------------------------------------
// Shared option plumbing

struct CommonArgs {
    std::string cloud_path;
    std::string config_path;
    std::string out_path;
    std::string sizes_text;
    std::string labels_text;
    std::string format = "binary";
    double cell_size = 0.0;  // 0 = take from config
    std::int64_t seed = -1;  // <0 = take from config
    int threads = 1;
};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, sep)) out.push_back(item);
    return out;
}

std::vector<eandt::SemanticLabel> parse_labels(const std::string& text) {
    std::vector<eandt::SemanticLabel> out;
    for (const std::string& name : split(text, ',')) {
        try {
            out.push_back(eandt::label_from_string(name));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--labels",
                                       "unknown label: " + name);
        }
    }
    if (out.empty())
        throw CLI::ValidationError("--labels", "no labels given");
    return out;
}

// `min:max:count:log` or `min:max:count:lin`.
std::vector<double> parse_sizes(const std::string& text) {
    const auto parts = split(text, ':');
    const auto fail = [&](const std::string& why) -> std::vector<double> {
        throw CLI::ValidationError("--sizes", why + ": " + text);
    };
    if (parts.size() != 4) return fail("expected min:max:count:log|lin");
    double lo = 0, hi = 0;
    long count = 0;
    try {
        std::size_t u1 = 0, u2 = 0, u3 = 0;
        lo = std::stod(parts[0], &u1);
        hi = std::stod(parts[1], &u2);
        count = std::stol(parts[2], &u3);
        if (u1 != parts[0].size() || u2 != parts[1].size() ||
            u3 != parts[2].size())
            return fail("bad number");
    } catch (const std::exception&) {
        return fail("bad number");
    }
    if (!(lo > 0.0) || hi < lo) return fail("need 0 < min <= max");
    if (count < 1 || count > 1000) return fail("count out of range");
    if (count == 1 && hi != lo) return fail("count 1 needs min == max");
    if (parts[3] == "log") {
        if (count == 1) return {lo};
        return eandt::sweep_sizes(lo, hi, static_cast<int>(count));
    }
    if (parts[3] != "lin") return fail("spacing must be log or lin");
    std::vector<double> out(count);
    for (long i = 0; i < count; ++i)
        out[i] = count == 1
                     ? lo
                     : lo + (hi - lo) * static_cast<double>(i) /
                               static_cast<double>(count - 1);
    out.front() = lo;
    out.back() = hi;
    return out;
}

eandt::ParsedConfig resolve_config(const CommonArgs& args) {
    eandt::ParsedConfig cfg = args.config_path.empty()
                                  ? eandt::default_parsed_config()
                                  : eandt::load_config(args.config_path);
    if (args.cell_size > 0.0) cfg.pipeline.cell_size = args.cell_size;
    if (args.seed >= 0)
        cfg.pipeline.seed = static_cast<std::uint64_t>(args.seed);
    cfg.pipeline.threads = args.threads;
    return cfg;
}

eandt::LabeledCloud load_labeled(const CommonArgs& args,
                                 const eandt::ParsedConfig& cfg) {
    if (args.cloud_path.empty())
        throw CLI::RequiredError("--cloud");
    return eandt::assign_hard_labels(eandt::load_cloud(args.cloud_path),
                                     cfg.merge_map);
}

// ---------------------------------------------------------------------------
// Run manifest

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(const std::string& bytes) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::string file_hash(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return "";
    std::ostringstream ss;
    ss << is.rdbuf();
    return hash_hex(ss.str());
}

json base_manifest(const std::string& command, const CommonArgs& args,
                   const eandt::ParsedConfig& cfg) {
    json m;
    m["command"] = command;
    m["tool_version"] = EANDT_VERSION;
    m["format_versions"] = {{"cloud", 1}, {"map", 1}};
    m["seed"] = cfg.pipeline.seed;
    m["cell_size"] = cfg.pipeline.cell_size;
    m["threads"] = args.threads;
    if (!args.config_path.empty()) {
        m["config"] = args.config_path;
        m["config_hash"] = file_hash(args.config_path);
    } else {
        m["config"] = "<default>";
    }
    if (!args.cloud_path.empty()) {
        m["cloud"] = args.cloud_path;
        m["cloud_hash"] = file_hash(args.cloud_path);
    }
    if (!args.labels_text.empty()) m["labels"] = args.labels_text;
    if (!args.sizes_text.empty()) m["sizes"] = args.sizes_text;
    return m;
}

void write_manifest(const json& m, const fs::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw eandt::DataError("cannot write " + path.string());
    os << m.dump(2) << "\n";
}

fs::path manifest_path_for(const std::string& out) {
    return fs::path(out.empty() ? "out" : out).concat(".manifest.json");
}

// ---------------------------------------------------------------------------
// Subcommands

void save_cloud_as(const eandt::LabeledCloud& cloud, const std::string& path,
                   const std::string& format) {
    if (format == "binary")
        eandt::save_cloud(cloud, path, eandt::CloudFormat::binary_native);
    else if (format == "text")
        eandt::save_cloud(cloud, path, eandt::CloudFormat::text_xyzilp);
    else
        throw CLI::ValidationError("--format", "must be binary or text");
}

int cmd_preprocess(const CommonArgs& args) {
    const eandt::ParsedConfig cfg = resolve_config(args);
    if (args.out_path.empty()) throw CLI::RequiredError("--out");
    if (args.cloud_path.empty()) throw CLI::RequiredError("--cloud");
    eandt::LabeledCloud cloud = eandt::load_cloud(args.cloud_path);
    const std::size_t raw = cloud.size();
    cloud = eandt::voxel_average_filter(cloud, cfg.pipeline.preprocess_voxel);
    cloud = eandt::smooth_label_probs(cloud, cfg.pipeline.preprocess_smooth);
    cloud = eandt::assign_hard_labels(cloud, cfg.merge_map);
    save_cloud_as(cloud, args.out_path, args.format);

    json m = base_manifest("preprocess", args, cfg);
    m["points_in"] = raw;
    m["points_out"] = cloud.size();
    m["voxel"] = cfg.pipeline.preprocess_voxel;
    m["smooth_radius"] = cfg.pipeline.preprocess_smooth;
    m["out"] = args.out_path;
    m["out_hash"] = file_hash(args.out_path);
    write_manifest(m, manifest_path_for(args.out_path));
    std::cout << "preprocessed " << raw << " -> " << cloud.size()
              << " points\n";
    return 0;
}

int cmd_synth(const CommonArgs& args, const std::string& spec_path) {
    if (args.out_path.empty()) throw CLI::RequiredError("--out");
    eandt::SceneSpec spec = spec_path.empty()
                                ? eandt::mini_suburb()
                                : eandt::load_scene_spec(spec_path);
    if (args.seed >= 0) spec.seed = static_cast<std::uint64_t>(args.seed);
    const eandt::LabeledCloud cloud = eandt::generate_scene(spec);
    save_cloud_as(cloud, args.out_path, args.format);

    CommonArgs margs = args;  // synth has no cloud/config inputs
    margs.cloud_path.clear();
    eandt::ParsedConfig cfg = eandt::default_parsed_config();
    cfg.pipeline.seed = spec.seed;
    json m = base_manifest("synth", margs, cfg);
    m["scene"] = spec_path.empty() ? "mini-suburb" : spec_path;
    if (!spec_path.empty() && spec_path != "mini-suburb")
        m["scene_hash"] = file_hash(spec_path);
    m["points"] = cloud.size();
    m["out"] = args.out_path;
    m["out_hash"] = file_hash(args.out_path);
    write_manifest(m, manifest_path_for(args.out_path));
    std::cout << "generated " << cloud.size() << " points\n";
    return 0;
}

int cmd_build(const CommonArgs& args, eandt::MapMethod method) {
    const eandt::ParsedConfig cfg = resolve_config(args);
    if (args.out_path.empty()) throw CLI::RequiredError("--out");
    const eandt::LabeledCloud cloud = load_labeled(args, cfg);
    const eandt::NdtMap map =
        method == eandt::MapMethod::grid_ndt
            ? eandt::build_grid_ndt(cloud, cfg.pipeline.cell_size,
                                    cfg.pipeline.seed)
            : eandt::build_ea_ndt(cloud, cfg);
    eandt::save_map(map, args.out_path);

    json m = base_manifest(method == eandt::MapMethod::grid_ndt ? "build-ndt"
                                                                : "build-ea",
                           args, cfg);
    m["cells"] = map.size();
    m["out"] = args.out_path;
    m["out_hash"] = file_hash(args.out_path);
    write_manifest(m, manifest_path_for(args.out_path));
    std::cout << eandt::to_string(method) << ": " << map.size() << " cells at "
              << map.cell_size() << " m\n";
    return 0;
}

int cmd_eval(const CommonArgs& args, const std::string& map_path) {
    const eandt::ParsedConfig cfg = resolve_config(args);
    if (map_path.empty()) throw CLI::RequiredError("--map");
    const eandt::NdtMap map = eandt::load_map(map_path);
    const eandt::LabeledCloud cloud = load_labeled(args, cfg);

    std::vector<eandt::SemanticLabel> labels;
    if (!args.labels_text.empty()) labels = parse_labels(args.labels_text);

    eandt::EvaluationReport report;
    std::vector<Eigen::Vector3d> all = cloud.positions;
    report.records.push_back(eandt::make_evaluation_record(
        map, all, std::nullopt, args.threads));
    for (eandt::SemanticLabel label : labels) {
        std::vector<Eigen::Vector3d> pts;
        for (int id : cloud.ids_with_label(label))
            pts.push_back(cloud.positions[id]);
        report.records.push_back(
            eandt::make_evaluation_record(map, pts, label, args.threads));
    }
    const std::string csv = eandt::report_csv(report);
    if (args.out_path.empty()) {
        std::cout << csv;
        return 0;
    }
    std::ofstream os(args.out_path, std::ios::binary);
    if (!os) throw eandt::DataError("cannot write " + args.out_path);
    os << csv;
    os.close();

    json m = base_manifest("eval", args, cfg);
    m["map"] = map_path;
    m["map_hash"] = file_hash(map_path);
    m["out"] = args.out_path;
    m["out_hash"] = file_hash(args.out_path);
    write_manifest(m, manifest_path_for(args.out_path));
    return 0;
}

int cmd_sweep(const CommonArgs& args, bool keep_maps) {
    const eandt::ParsedConfig cfg = resolve_config(args);
    if (args.out_path.empty()) throw CLI::RequiredError("--out");
    const eandt::LabeledCloud cloud = load_labeled(args, cfg);
    const std::vector<double> sizes = args.sizes_text.empty()
                                          ? eandt::sweep_sizes()
                                          : parse_sizes(args.sizes_text);

    const fs::path out_dir(args.out_path);
    fs::create_directories(out_dir);

    eandt::MapSink sink;
    if (keep_maps) {
        sink = [&](const eandt::NdtMap& map) {
            const auto it =
                std::find(sizes.begin(), sizes.end(), map.cell_size());
            const auto index =
                static_cast<int>(std::distance(sizes.begin(), it));
            char name[64];
            std::snprintf(name, sizeof name, "map_%s_%02d.bin",
                          eandt::to_string(map.method()).c_str(), index);
            eandt::save_map(map, (out_dir / name).string());
        };
    }
    const eandt::EvaluationReport report =
        eandt::sweep(cloud, cfg, sizes, sink);

    {
        std::ofstream os(out_dir / "report.csv", std::ios::binary);
        os << eandt::report_csv(report);
    }
    {
        std::ofstream os(out_dir / "derived.csv", std::ios::binary);
        os << eandt::derived_csv(report);
    }

    json m = base_manifest("sweep", args, cfg);
    m["sizes_m"] = sizes;
    m["failed_sizes"] = report.failed_sizes;
    m["out"] = args.out_path;
    write_manifest(m, out_dir / "manifest.json");
    std::cout << "sweep: " << report.records.size() << " records over "
              << sizes.size() << " sizes";
    if (!report.failed_sizes.empty())
        std::cout << " (" << report.failed_sizes.size() << " failed)";
    std::cout << "\n";
    return 0;
}

int cmd_fit_params(const CommonArgs& args) {
    const eandt::ParsedConfig cfg = resolve_config(args);
    const eandt::LabeledCloud cloud = load_labeled(args, cfg);
    const std::vector<double> sizes =
        args.sizes_text.empty() ? eandt::sweep_sizes(0.4, 1.2, 5)
                                : parse_sizes(args.sizes_text);
    std::vector<eandt::SemanticLabel> labels(eandt::kUsedLabels.begin(),
                                             eandt::kUsedLabels.end());
    if (!args.labels_text.empty()) labels = parse_labels(args.labels_text);

    const auto extracted = eandt::extract_primitives(cloud, cfg);
    std::ostringstream out;
    out << "# fitted cell-count scaling parameters\n";
    for (eandt::SemanticLabel label : labels) {
        const auto it = std::find_if(
            extracted.begin(), extracted.end(),
            [&](const auto& lp) { return lp.label == label; });
        if (it == extracted.end() || it->primitives.empty()) {
            out << "# " << eandt::to_string(label) << ": no primitives\n";
            continue;
        }
        const eandt::FittedParams fit =
            eandt::fit_scaling_params(cloud, *it, sizes);
        char line[160];
        std::snprintf(line, sizeof line, "%s.f = %.17g\n%s.g = %.17g\n",
                      eandt::to_string(label), fit.f,
                      eandt::to_string(label), fit.g);
        out << line;
    }
    if (args.out_path.empty()) {
        std::cout << out.str();
        return 0;
    }
    std::ofstream os(args.out_path, std::ios::binary);
    if (!os) throw eandt::DataError("cannot write " + args.out_path);
    os << out.str();
    os.close();

    json m = base_manifest("fit-params", args, cfg);
    m["out"] = args.out_path;
    m["out_hash"] = file_hash(args.out_path);
    write_manifest(m, manifest_path_for(args.out_path));
    return 0;
}

int cmd_info(const std::string& cloud_path, const std::string& map_path) {
    if (cloud_path.empty() && map_path.empty())
        throw CLI::RequiredError("--cloud or --map");
    if (!cloud_path.empty()) {
        const eandt::LabeledCloud cloud = eandt::load_cloud(cloud_path);
        std::cout << "cloud: " << cloud_path << "\n  points: " << cloud.size()
                  << "\n  classes:";
        for (const auto& name : cloud.class_names) std::cout << " " << name;
        std::cout << "\n  frame: " << cloud.frame_id << "\n";
        if (!cloud.empty()) {
            Eigen::Vector3d lo = cloud.positions.front(), hi = lo;
            for (const auto& p : cloud.positions) {
                lo = lo.cwiseMin(p);
                hi = hi.cwiseMax(p);
            }
            std::cout << "  bbox: [" << lo.transpose() << "] -- ["
                      << hi.transpose() << "]\n";
        }
    }
    if (!map_path.empty()) {
        const eandt::NdtMap map = eandt::load_map(map_path);
        std::cout << "map: " << map_path
                  << "\n  method: " << eandt::to_string(map.method())
                  << "\n  cell size: " << map.cell_size()
                  << "\n  seed: " << map.seed()
                  << "\n  cells: " << map.size() << "\n";
        for (eandt::SemanticLabel label : eandt::kUsedLabels) {
            std::size_t n = 0;
            for (const auto& cell : map.cells())
                if (cell.label == label) ++n;
            if (n > 0)
                std::cout << "    " << eandt::to_string(label) << ": " << n
                          << "\n";
        }
    }
    return 0;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool with_cloud = true) {
    if (with_cloud)
        cmd->add_option("--cloud", args.cloud_path, "Input cloud file");
    cmd->add_option("--config", args.config_path, "Config file");
    cmd->add_option("--cell-size", args.cell_size, "Cell size in meters")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", args.seed, "RNG seed")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--sizes", args.sizes_text,
                    "Cell sizes as min:max:count:log|lin");
    cmd->add_option("--labels", args.labels_text,
                    "Comma-separated label subset");
    cmd->add_option("--out", args.out_path, "Output file or directory");
    cmd->add_option("--threads", args.threads, "Worker thread count")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--format", args.format,
                    "Cloud output format: binary|text");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Environment-aware NDT map compression toolkit"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for all subcommands");

    CommonArgs args;
    std::string spec_path, map_path;
    bool keep_maps = false;

    CLI::App* preprocess = app.add_subcommand(
        "preprocess", "Voxel-average, smooth probs, assign labels");
    add_common(preprocess, args);

    CLI::App* synth =
        app.add_subcommand("synth", "Generate a synthetic labeled scene");
    synth->add_option("--spec", spec_path,
                      "Scene spec file or `mini-suburb`");
    add_common(synth, args, false);

    CLI::App* build_ndt =
        app.add_subcommand("build-ndt", "Build a uniform-grid NDT map");
    add_common(build_ndt, args);

    CLI::App* build_ea =
        app.add_subcommand("build-ea", "Build an environment-aware NDT map");
    add_common(build_ea, args);

    CLI::App* eval_cmd =
        app.add_subcommand("eval", "Score a map against a cloud");
    eval_cmd->add_option("--map", map_path, "Map file");
    add_common(eval_cmd, args);

    CLI::App* sweep_cmd = app.add_subcommand(
        "sweep", "Build and score both methods across cell sizes");
    sweep_cmd->add_flag("--keep-maps", keep_maps,
                        "Also write every built map");
    add_common(sweep_cmd, args);

    CLI::App* fit_cmd = app.add_subcommand(
        "fit-params", "Fit per-label cell-count scaling parameters");
    add_common(fit_cmd, args);

    CLI::App* info = app.add_subcommand("info", "Describe a cloud or map");
    info->add_option("--cloud", args.cloud_path, "Cloud file");
    info->add_option("--map", map_path, "Map file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (preprocess->parsed()) return cmd_preprocess(args);
        if (synth->parsed()) return cmd_synth(args, spec_path);
        if (build_ndt->parsed())
            return cmd_build(args, eandt::MapMethod::grid_ndt);
        if (build_ea->parsed())
            return cmd_build(args, eandt::MapMethod::ea_ndt);
        if (eval_cmd->parsed()) return cmd_eval(args, map_path);
        if (sweep_cmd->parsed()) return cmd_sweep(args, keep_maps);
        if (fit_cmd->parsed()) return cmd_fit_params(args);
        if (info->parsed()) return cmd_info(args.cloud_path, map_path);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const eandt::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
