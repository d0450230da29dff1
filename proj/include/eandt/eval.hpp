#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eandt/ndt_cell.hpp"
#include "eandt/ndt_map.hpp"
#include "eandt/pipeline.hpp"
#include "eandt/types.hpp"

namespace eandt {

// Per-point data footprint (3xf32 position + f32 intensity) and per-cell
// footprint (u32 count + 3xf32 sum + 6xf32 covariance + u8 label, padded)
// used by the compression ratio.
inline constexpr double kPointBytes = 16.0;
inline constexpr double kCellBytes = 44.0;

// Multivariate normal density at x; sigma must be invertible (guaranteed
// for cell_gaussian output).
double density(const Eigen::Vector3d& x, const GaussianParams& g);

// Mean over the given points of the best cell density among cells within
// 2 * s_c of the point; points with no candidate cell contribute zero.
// `label`: restrict candidate cells to one label (nullopt = all cells).
// Per-point maxima land in indexed slots before a fixed-order sum, so the
// result is identical for any thread count.
double descriptivity_score(const NdtMap& map,
                           const std::vector<Eigen::Vector3d>& points,
                           std::optional<SemanticLabel> label = {},
                           int threads = 1);

// One method x label-scope x cell-size measurement. label "complete" uses
// every used label.
struct EvaluationRecord {
    MapMethod method = MapMethod::grid_ndt;
    std::string label;  // label name or "complete"
    double cell_size = 0.0;
    std::int64_t num_cells = 0;
    std::int64_t num_points = 0;
    double score = 0.0;             // S_d
    double compression_ratio = 0.0; // N_p * sigma_p / (N_c * sigma_c)
};

struct DerivedRatios {
    // R_d = S_d(ea) / S_d(grid) at equal cell size and label scope.
    struct Rd { double cell_size; std::string label; double value; };
    // eta = N_c(grid) / N_c(ea) at equal S_d (log-log interpolated).
    struct Eta { std::string label; double score; double value; };
    std::vector<Rd> rd;
    std::vector<Eta> eta;
};

struct EvaluationReport {
    std::vector<EvaluationRecord> records;
    DerivedRatios derived;
    std::vector<double> sizes;
    std::vector<double> failed_sizes;
    double applicable_min = 0.5, applicable_max = 2.0;  // meters
};

// Score one map against one point set. label nullopt scores the complete
// map; otherwise both candidate cells and the reported cell count are
// restricted to that label.
EvaluationRecord make_evaluation_record(
    const NdtMap& map, const std::vector<Eigen::Vector3d>& points,
    std::optional<SemanticLabel> label = {}, int threads = 1);

// eta samples for one EA curve against one grid curve: for each EA point,
// interpolate the grid N_c at equal S_d by monotone piecewise-linear
// interpolation in (log S_d, log N_c); EA points outside the grid curve's
// S_d range are skipped.
struct CurvePoint { double num_cells; double score; };
std::vector<DerivedRatios::Eta> compression_efficiency(
    const std::vector<CurvePoint>& ea, const std::vector<CurvePoint>& grid,
    const std::string& label);

// 30 logarithmically spaced cell sizes over [0.2, 10], endpoints exact.
std::vector<double> sweep_sizes(double lo = 0.2, double hi = 10.0,
                                int count = 30);

// Build both methods at every size and evaluate per-label and complete
// scores. A size whose build fails is recorded in failed_sizes and skipped.
// Optional hook receives each built map (for byte-level artifacts).
using MapSink = std::function<void(const NdtMap&)>;
EvaluationReport sweep(const LabeledCloud& cloud, const ParsedConfig& cfg,
                       const std::vector<double>& sizes,
                       const MapSink& sink = {});

// CSV emission; the derived file carries both R_d and eta sections.
std::string report_csv(const EvaluationReport& report);
std::string derived_csv(const EvaluationReport& report);

}  // namespace eandt
