#ifndef SMDBENCH_SUITE_HPP
#define SMDBENCH_SUITE_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smdbench/problem.hpp"

namespace smd {

/// Builds one of the twelve suite problems for the given partition sizes.
/// Throws std::invalid_argument citing the violated rule when dims are not
/// admissible for the problem (e.g. SMD10 needs q >= 2).
ProblemInstance instantiate(ProblemId id, const Dims& dims);

/// The benchmark partition presets for total dimension 5, 10 or 20.
Dims preset_dims(ProblemId id, int total_dimension);

/// Names one variable for grid slicing: a framework block plus a zero-based
/// index within the block.
struct AxisRef {
    enum class Block { Xu1, Xu2, Xl1, Xl2 };
    Block block = Block::Xu1;
    int index = 0;

    bool operator==(const AxisRef&) const = default;
};

/// Parses "xu1", "xl2[2]" (1-based bracket index) into an AxisRef.
std::optional<AxisRef> parse_axis(std::string_view text);
std::string to_string(const AxisRef& axis);

struct GridSample {
    double a1 = 0.0;
    double a2 = 0.0;
    double F = 0.0;
    double f = 0.0;
    bool valid = true;
};

/// Row-major sweep (axis1 outer) of the two free variables over their box
/// ranges; all remaining variables stay at `base`.
struct ContourGrid {
    AxisRef axis1;
    AxisRef axis2;
    int resolution = 0;
    std::vector<GridSample> samples;
};

/// Evaluates F and f on a resolution x resolution grid. With follow_psi set
/// and both axes at the upper level, the lower block tracks the analytic Ψ
/// reference of each grid point instead of the base assignment.
ContourGrid contour_grid(const ProblemInstance& inst, const BilevelVector& base,
                         AxisRef axis1, AxisRef axis2, int resolution,
                         bool follow_psi = false);

/// CSV export with the fixed header axis1,axis2,F,f. Out-of-domain cells are
/// flagged by nan objective values.
void write_grid_csv(std::ostream& os, const ContourGrid& grid);

/// JSON catalog (id, dims, bounds, constraint counts, property flags) of the
/// given instances.
std::string catalog_json(const std::vector<ProblemInstance>& instances);

}  // namespace smd

#endif  // SMDBENCH_SUITE_HPP
