#ifndef SMDBENCH_CORE_HPP
#define SMDBENCH_CORE_HPP

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace smd {

/// Variable-partition cardinalities shared by every bilevel problem.
///
/// The upper level owns p + r variables laid out as (xu1, xu2) and the lower
/// level owns q + s + r variables laid out as (xl1, xl2), where xl1 includes
/// the s extra components used by problems with a non-trivial valley term.
struct Dims {
    int p = 0;  ///< xu1 components (upper-level convergence block)
    int q = 0;  ///< xl1 components (lower-level convergence block)
    int r = 0;  ///< paired xu2 / xl2 components (interaction block)
    int s = 0;  ///< extra xl1 components (0 for most problems)

    constexpr int upper() const noexcept { return p + r; }
    constexpr int lower() const noexcept { return q + s + r; }

    /// Throws std::invalid_argument unless all counts are non-negative and
    /// each level has at least one variable.
    void validate() const;

    bool operator==(const Dims&) const = default;
};

/// One box interval, optionally open at either end. Open endpoints carry an
/// interior margin so sampled and clamped values stay strictly inside, which
/// keeps arguments of log/tan finite.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool open_lo = false;
    bool open_hi = false;

    /// Interior margin for open endpoints, as a fraction of the width.
    static constexpr double kOpenMargin = 1e-6;

    double width() const noexcept { return hi - lo; }
    double inner_lo() const noexcept { return open_lo ? lo + kOpenMargin * width() : lo; }
    double inner_hi() const noexcept { return open_hi ? hi - kOpenMargin * width() : hi; }

    /// Projects x into the interval, respecting open-endpoint margins.
    double clamp(double x) const noexcept;
    /// Membership test; strict at open endpoints.
    bool contains(double x) const noexcept;

    bool operator==(const Interval&) const = default;
};

/// Per-variable box bounds for one level (flat block layout).
class Bounds {
public:
    Bounds() = default;
    explicit Bounds(std::vector<Interval> intervals);

    /// n copies of the same interval.
    static Bounds uniform(std::size_t n, Interval iv);
    /// Concatenation of two blocks.
    static Bounds concat(const Bounds& a, const Bounds& b);

    std::size_t size() const noexcept { return intervals_.size(); }
    bool empty() const noexcept { return intervals_.empty(); }
    const Interval& operator[](std::size_t i) const noexcept { return intervals_[i]; }
    const std::vector<Interval>& intervals() const noexcept { return intervals_; }

    bool contains(std::span<const double> v) const;
    /// Clamps in place; v.size() must match.
    void clamp_in_place(std::span<double> v) const;
    /// Uniform sample strictly inside open endpoints.
    std::vector<double> sample(std::mt19937_64& rng) const;

    bool operator==(const Bounds&) const = default;

private:
    std::vector<Interval> intervals_;
};

/// A decision point partitioned into the four framework blocks.
struct BilevelVector {
    std::vector<double> xu1;
    std::vector<double> xu2;
    std::vector<double> xl1;  ///< length q + s
    std::vector<double> xl2;

    std::vector<double> upper_flat() const;
    std::vector<double> lower_flat() const;
    bool matches(const Dims& dims) const noexcept;

    bool operator==(const BilevelVector&) const = default;
};

/// Partitions flat per-level vectors into blocks. Concatenating the blocks
/// back reproduces the inputs exactly.
BilevelVector split(std::span<const double> upper_flat,
                    std::span<const double> lower_flat, const Dims& dims);

/// Which variables a constraint depends on (Table-2 style taxonomy):
/// subset a = upper variables only, b = lower only, c = both.
enum class ConstraintScope { UpperVars, LowerVars, BothVars };

const char* to_string(ConstraintScope scope) noexcept;

/// Objectives and constraint values of one evaluation. Constraints use the
/// c(x) >= 0 feasibility convention at both levels.
struct EvalOutcome {
    double F = 0.0;  ///< upper objective
    double f = 0.0;  ///< lower objective
    std::vector<double> G;  ///< upper constraints, feasible iff >= 0
    std::vector<double> g;  ///< lower constraints, feasible iff >= 0
    std::vector<ConstraintScope> G_scope;
    std::vector<ConstraintScope> g_scope;

    double upper_violation() const;
    double lower_violation() const;
    bool feasible() const;
};

/// Sum of violations: Σ_j max(0, -c_j). Zero exactly when every c_j >= 0.
double total_violation(std::span<const double> constraints);

/// Componentwise projection into the box; open endpoints map to the interior
/// margin. Idempotent.
std::vector<double> clamp_to_bounds(std::span<const double> v, const Bounds& bounds);

namespace detail {
[[noreturn]] void throw_length_mismatch(const std::string& what, std::size_t got,
                                        std::size_t want);
}  // namespace detail

}  // namespace smd

#endif  // SMDBENCH_CORE_HPP
