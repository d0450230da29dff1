#include "eandt/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "eandt/parallel.hpp"

namespace eandt {

double density(const Eigen::Vector3d& x, const GaussianParams& g) {
    if (!x.allFinite() || !g.mu.allFinite() || !g.sigma.allFinite())
        throw std::invalid_argument("non-finite density inputs");
    const Eigen::LLT<Eigen::Matrix3d> llt(g.sigma);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("covariance is not positive definite");
    const Eigen::Matrix3d l = llt.matrixL();
    const double det = l(0, 0) * l(0, 0) * l(1, 1) * l(1, 1) * l(2, 2) * l(2, 2);
    const Eigen::Vector3d z =
        l.triangularView<Eigen::Lower>().solve(x - g.mu);
    const double quad = z.squaredNorm();
    constexpr double two_pi_cubed = 8.0 * std::numbers::pi * std::numbers::pi *
                                    std::numbers::pi;
    return std::exp(-0.5 * quad) / std::sqrt(two_pi_cubed * det);
}

double descriptivity_score(const NdtMap& map,
                           const std::vector<Eigen::Vector3d>& points,
                           std::optional<SemanticLabel> label, int threads) {
    if (points.empty())
        throw std::invalid_argument("descriptivity needs at least one point");

    // One Gaussian per cell, reused across points.
    std::vector<GaussianParams> gaussians;
    gaussians.reserve(map.size());
    for (const NdtCell& cell : map.cells())
        gaussians.push_back(cell_gaussian(cell));

    const double radius = 2.0 * map.cell_size();
    std::vector<double> best(points.size(), 0.0);
    parallel_for(static_cast<int>(points.size()), threads, [&](int i) {
        double value = 0.0;
        for (int c : map.radius_query(points[i], radius)) {
            if (label && map.cells()[c].label != *label) continue;
            const double d = density(points[i], gaussians[c]);
            if (d > value) value = d;
        }
        best[i] = value;
    });

    double sum = 0.0;
    for (double v : best) sum += v;
    return sum / static_cast<double>(points.size());
}

std::vector<double> sweep_sizes(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2)
        throw std::invalid_argument("invalid sweep size range");
    std::vector<double> sizes(count);
    const double step = (std::log(hi) - std::log(lo)) / (count - 1);
    for (int i = 0; i < count; ++i)
        sizes[i] = std::exp(std::log(lo) + step * i);
    sizes.front() = lo;  // endpoints exact
    sizes.back() = hi;
    return sizes;
}

std::vector<DerivedRatios::Eta> compression_efficiency(
    const std::vector<CurvePoint>& ea, const std::vector<CurvePoint>& grid,
    const std::string& label) {
    std::vector<DerivedRatios::Eta> out;
    if (ea.size() < 2 || grid.size() < 2) return out;

    // Grid curve as a function score -> cells, sorted by score; duplicate
    // scores keep their first occurrence.
    std::vector<CurvePoint> knots;
    for (const CurvePoint& p : grid)
        if (p.score > 0.0 && p.num_cells > 0.0) knots.push_back(p);
    if (knots.size() < 2) return out;
    std::stable_sort(knots.begin(), knots.end(),
                     [](const CurvePoint& a, const CurvePoint& b) {
                         return a.score < b.score;
                     });
    knots.erase(std::unique(knots.begin(), knots.end(),
                            [](const CurvePoint& a, const CurvePoint& b) {
                                return a.score == b.score;
                            }),
                knots.end());
    if (knots.size() < 2) return out;

    for (const CurvePoint& p : ea) {
        if (!(p.score > 0.0) || !(p.num_cells > 0.0)) continue;
        if (p.score < knots.front().score || p.score > knots.back().score)
            continue;  // no matching grid score
        // Exact knot hits bypass the interpolation so identical curves give
        // eta == 1 to the bit.
        double grid_cells = -1.0;
        for (const CurvePoint& k : knots)
            if (k.score == p.score) { grid_cells = k.num_cells; break; }
        if (grid_cells < 0.0) {
            std::size_t hi = 1;
            while (hi + 1 < knots.size() && knots[hi].score < p.score) ++hi;
            const CurvePoint& a = knots[hi - 1];
            const CurvePoint& b = knots[hi];
            const double t = (std::log(p.score) - std::log(a.score)) /
                             (std::log(b.score) - std::log(a.score));
            grid_cells = std::exp(std::log(a.num_cells) +
                                  t * (std::log(b.num_cells) -
                                       std::log(a.num_cells)));
        }
        out.push_back({label, p.score, grid_cells / p.num_cells});
    }
    return out;
}

namespace {

double compression_ratio(std::int64_t num_points, std::int64_t num_cells) {
    if (num_cells <= 0) return 0.0;
    return static_cast<double>(num_points) * kPointBytes /
           (static_cast<double>(num_cells) * kCellBytes);
}

std::int64_t count_label_cells(const NdtMap& map, SemanticLabel label) {
    std::int64_t n = 0;
    for (const NdtCell& cell : map.cells())
        if (cell.label == label) ++n;
    return n;
}

EvaluationRecord make_record(const NdtMap& map, MapMethod method,
                             const std::string& scope, double size,
                             std::int64_t cells,
                             const std::vector<Eigen::Vector3d>& points,
                             std::optional<SemanticLabel> label,
                             int threads) {
    EvaluationRecord rec;
    rec.method = method;
    rec.label = scope;
    rec.cell_size = size;
    rec.num_cells = cells;
    rec.num_points = static_cast<std::int64_t>(points.size());
    rec.score = points.empty() || cells == 0
                    ? 0.0
                    : descriptivity_score(map, points, label, threads);
    rec.compression_ratio = compression_ratio(rec.num_points, rec.num_cells);
    return rec;
}

}  // namespace

EvaluationRecord make_evaluation_record(
    const NdtMap& map, const std::vector<Eigen::Vector3d>& points,
    std::optional<SemanticLabel> label, int threads) {
    const std::string scope = label ? to_string(*label) : "complete";
    const std::int64_t cells = label
                                   ? count_label_cells(map, *label)
                                   : static_cast<std::int64_t>(map.size());
    return make_record(map, map.method(), scope, map.cell_size(), cells,
                       points, label, threads);
}

EvaluationReport sweep(const LabeledCloud& cloud, const ParsedConfig& cfg,
                       const std::vector<double>& sizes, const MapSink& sink) {
    if (!cloud.has_labels())
        throw std::invalid_argument("sweep requires hard labels");

    EvaluationReport report;
    report.sizes = sizes;

    // Per-label evaluation point sets; extraction is shared by every size.
    std::array<std::vector<Eigen::Vector3d>, kUsedLabels.size()> label_points;
    for (std::size_t li = 0; li < kUsedLabels.size(); ++li)
        for (int id : cloud.ids_with_label(kUsedLabels[li]))
            label_points[li].push_back(cloud.positions[id]);
    const std::vector<Eigen::Vector3d>& all_points = cloud.positions;

    const std::vector<LabelPrimitives> extracted =
        extract_primitives(cloud, cfg);
    const int threads = cfg.pipeline.threads;

    for (double s : sizes) {
        try {
            ParsedConfig sized = cfg;
            sized.pipeline.cell_size = s;
            const NdtMap grid = build_grid_ndt(cloud, s, cfg.pipeline.seed);
            const NdtMap ea = build_ea_ndt_from(cloud, extracted, sized);
            if (sink) {
                sink(grid);
                sink(ea);
            }
            for (const NdtMap* map : {&grid, &ea}) {
                const MapMethod method = map->method();
                for (std::size_t li = 0; li < kUsedLabels.size(); ++li) {
                    const SemanticLabel label = kUsedLabels[li];
                    report.records.push_back(make_record(
                        *map, method, to_string(label), s,
                        count_label_cells(*map, label), label_points[li],
                        label, threads));
                }
                report.records.push_back(make_record(
                    *map, method, "complete", s,
                    static_cast<std::int64_t>(map->size()), all_points, {},
                    threads));
            }
        } catch (const std::exception&) {
            report.failed_sizes.push_back(s);
        }
    }

    // R_d wherever both methods scored the same size and scope.
    std::vector<std::string> scopes;
    for (SemanticLabel label : kUsedLabels) scopes.push_back(to_string(label));
    scopes.push_back("complete");
    auto find_record = [&](MapMethod method, const std::string& scope,
                           double s) -> const EvaluationRecord* {
        for (const auto& rec : report.records)
            if (rec.method == method && rec.label == scope &&
                rec.cell_size == s)
                return &rec;
        return nullptr;
    };
    for (double s : sizes) {
        for (const std::string& scope : scopes) {
            const EvaluationRecord* ea = find_record(MapMethod::ea_ndt, scope, s);
            const EvaluationRecord* grid =
                find_record(MapMethod::grid_ndt, scope, s);
            if (!ea || !grid || !(grid->score > 0.0)) continue;
            report.derived.rd.push_back({s, scope, ea->score / grid->score});
        }
    }

    // eta per scope from the two curves over all successful sizes.
    for (const std::string& scope : scopes) {
        std::vector<CurvePoint> ea_curve, grid_curve;
        for (double s : sizes) {
            if (const auto* rec = find_record(MapMethod::ea_ndt, scope, s))
                ea_curve.push_back(
                    {static_cast<double>(rec->num_cells), rec->score});
            if (const auto* rec = find_record(MapMethod::grid_ndt, scope, s))
                grid_curve.push_back(
                    {static_cast<double>(rec->num_cells), rec->score});
        }
        auto etas = compression_efficiency(ea_curve, grid_curve, scope);
        report.derived.eta.insert(report.derived.eta.end(), etas.begin(),
                                  etas.end());
    }
    return report;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string report_csv(const EvaluationReport& report) {
    std::string out = "method,label,s_c,N_c,N_p,S_d,R_c\n";
    for (const EvaluationRecord& rec : report.records) {
        out += to_string(rec.method);
        out += ',';
        out += rec.label;
        out += ',';
        out += format_double(rec.cell_size);
        out += ',';
        out += std::to_string(rec.num_cells);
        out += ',';
        out += std::to_string(rec.num_points);
        out += ',';
        out += format_double(rec.score);
        out += ',';
        out += format_double(rec.compression_ratio);
        out += '\n';
    }
    return out;
}

std::string derived_csv(const EvaluationReport& report) {
    std::string out = "s_c,label,R_d\n";
    for (const auto& rd : report.derived.rd) {
        out += format_double(rd.cell_size);
        out += ',';
        out += rd.label;
        out += ',';
        out += format_double(rd.value);
        out += '\n';
    }
    out += "\nlabel,S_d,eta\n";
    for (const auto& eta : report.derived.eta) {
        out += eta.label;
        out += ',';
        out += format_double(eta.score);
        out += ',';
        out += format_double(eta.value);
        out += '\n';
    }
    return out;
}

}  // namespace eandt
