#ifndef SMDBENCH_PROBLEM_HPP
#define SMDBENCH_PROBLEM_HPP

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "smdbench/core.hpp"

namespace smd {

/// The twelve suite problems. SMD1-SMD8 are unconstrained, SMD9-SMD12
/// constrained.
enum class ProblemId {
    SMD1, SMD2, SMD3, SMD4, SMD5, SMD6,
    SMD7, SMD8, SMD9, SMD10, SMD11, SMD12,
};

inline constexpr int kProblemCount = 12;

const char* to_string(ProblemId id) noexcept;
std::optional<ProblemId> parse_problem_id(std::string_view name) noexcept;
/// All twelve ids in suite order.
const std::vector<ProblemId>& all_problem_ids();

/// Qualitative difficulty profile of an instance.
struct ProblemProperties {
    bool conflicting = false;        ///< improving f near Ψ worsens F
    bool cooperative = false;        ///< improving f near Ψ improves F
    bool lower_multimodal = false;
    bool upper_multimodal = false;
    bool multi_global_lower = false;  ///< Ψ set-valued
    bool constrained = false;
};

/// A known bilevel optimum together with its objective values.
struct OptimumRecord {
    BilevelVector x;
    double F = 0.0;
    double f = 0.0;
};

/// The lower-level optimal response for a fixed upper vector. For problems
/// whose Ψ mapping is set-valued, xl1/xl2 hold a canonical representative and
/// set_residual is a non-null function whose zero set characterises the whole
/// optimal set.
struct PsiReference {
    std::vector<double> xl1;
    std::vector<double> xl2;
    bool is_unique = true;
    std::function<double(std::span<const double> xl1, std::span<const double> xl2)>
        set_residual;
};

/// A concrete, evaluable bilevel problem. Instances are immutable after
/// construction; evaluation entry points are pure and safe to call from many
/// threads at once.
class ProblemInstance {
public:
    std::string name;
    std::optional<ProblemId> id;
    Dims dims;
    Bounds upper_bounds;  ///< layout (xu1, xu2)
    Bounds lower_bounds;  ///< layout (xl1, xl2)
    std::vector<ConstraintScope> upper_scopes;  ///< one tag per upper constraint
    std::vector<ConstraintScope> lower_scopes;  ///< one tag per lower constraint
    ProblemProperties properties;

    std::function<double(const BilevelVector&)> upper_objective;
    std::function<double(const BilevelVector&)> lower_objective;
    /// Fill G values; null when the instance has no upper constraints.
    std::function<void(const BilevelVector&, std::span<double>)> upper_constraint_fn;
    std::function<void(const BilevelVector&, std::span<double>)> lower_constraint_fn;
    /// Analytic Ψ oracle; null for instances without one.
    std::function<PsiReference(std::span<const double> xu1, std::span<const double> xu2)>
        psi_fn;
    std::optional<OptimumRecord> optimum;

    std::size_t upper_constraint_count() const noexcept { return upper_scopes.size(); }
    std::size_t lower_constraint_count() const noexcept { return lower_scopes.size(); }
    bool has_psi() const noexcept { return static_cast<bool>(psi_fn); }

    /// Full evaluation of objectives and constraints. Throws
    /// std::domain_error when v lies outside the box (strictly inside is
    /// required at open endpoints); never clamps silently.
    EvalOutcome evaluate(const BilevelVector& v) const;

    /// Upper objective plus upper constraints; G_out.size() must equal
    /// upper_constraint_count(). Same domain checks as evaluate().
    double upper_value(const BilevelVector& v, std::span<double> G_out) const;

    /// Lower objective plus lower constraints, the solver's inner-loop path.
    double lower_value(const BilevelVector& v, std::span<double> g_out) const;

    /// Analytic lower-level optimum for the given upper blocks.
    PsiReference psi_reference(std::span<const double> xu1,
                               std::span<const double> xu2) const;
    PsiReference psi_reference(std::span<const double> xu_flat) const;

    /// Throws std::logic_error when the instance has no recorded optimum.
    const OptimumRecord& known_optimum() const;

    /// Validates block lengths and box membership.
    void require_in_domain(const BilevelVector& v) const;
};

}  // namespace smd

#endif  // SMDBENCH_PROBLEM_HPP
