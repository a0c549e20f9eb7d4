#ifndef SMDBENCH_CONSTRUCTION_HPP
#define SMDBENCH_CONSTRUCTION_HPP

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "smdbench/problem.hpp"

namespace smd {

/// Bitmask of the framework blocks a component function may read.
enum class BlockSet : unsigned {
    None = 0,
    Xu1 = 1u << 0,
    Xu2 = 1u << 1,
    Xl1 = 1u << 2,
    Xl2 = 1u << 3,
};

constexpr BlockSet operator|(BlockSet a, BlockSet b) {
    return static_cast<BlockSet>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}
constexpr bool reads_only(BlockSet reads, BlockSet allowed) {
    return (static_cast<unsigned>(reads) & ~static_cast<unsigned>(allowed)) == 0;
}
constexpr bool reads_block(BlockSet reads, BlockSet block) {
    return (static_cast<unsigned>(reads) & static_cast<unsigned>(block)) != 0;
}

/// One building block of a composed objective. The evaluation rule must read
/// only the declared blocks; tests probe this by varying undeclared blocks.
struct ComponentFunction {
    std::string label;
    BlockSet reads = BlockSet::None;
    std::function<double(const BilevelVector&)> fn;
    std::optional<double> known_min;  ///< minimal value, when the author knows it

    double operator()(const BilevelVector& v) const { return fn(v); }
};

/// Interaction layouts between the levels. Cooperative and Conflicting are
/// the two pure sign patterns; MixedA/MixedB are the two opposite-sign
/// layouts that mix cooperation and conflict.
enum class InteractionMode { Cooperative, Conflicting, MixedA, MixedB };

const char* to_string(InteractionMode mode) noexcept;

/// Assembles an unconstrained instance F = F1+F2+F3, f = f1+f2+f3 after
/// checking that every component reads only its allowed blocks
/// (F1: xu1; F2: xl1; F3: xu2,xl2; f1: xu1,xu2; f2: xl1; f3: xu2,xl2).
/// Property flags are left unset; the caller declares them.
ProblemInstance compose(const ComponentFunction& F1, const ComponentFunction& F2,
                        const ComponentFunction& F3, const ComponentFunction& f1,
                        const ComponentFunction& f2, const ComponentFunction& f3,
                        const Bounds& upper_bounds, const Bounds& lower_bounds,
                        const Dims& dims, std::string name = "composed");

/// Derives (F2, F3) from the lower components and an xu2-only term F4:
/// Cooperative -> (f2, F4+f3); Conflicting -> (-f2, F4-f3);
/// MixedA -> (f2, F4-f3); MixedB -> (-f2, F4+f3).
std::pair<ComponentFunction, ComponentFunction> apply_interaction(
    const ComponentFunction& f2, const ComponentFunction& f3,
    const ComponentFunction& F4, InteractionMode mode);

/// Replaces a convergence term by the consecutive-difference form whose zero
/// set is the diagonal (all xl1 components equal), giving the lower level
/// non-unique optima. Requires at least two xl1 components at call time.
ComponentFunction multi_global_lower(const ComponentFunction& base);

/// Leader/follower duopoly coefficients: linear inverse demand
/// P(Q) = alpha − beta·Q and convex quadratic costs
/// C(q) = delta·q² + gamma·q + c per firm.
struct StackelbergParams {
    double alpha = 0.0;
    double beta = 0.0;
    double delta_l = 0.0;
    double gamma_l = 0.0;
    double c_l = 0.0;
    double delta_f = 0.0;
    double gamma_f = 0.0;
    double c_f = 0.0;

    /// Throws std::invalid_argument unless alpha, beta, deltas, gammas > 0
    /// and fixed costs >= 0.
    void validate() const;
};

/// Closed-form Stackelberg equilibrium; depends only on the parameters.
struct StackelbergSolution {
    double q_l = 0.0;
    double q_f = 0.0;
    double Q = 0.0;         ///< q_l + q_f (demand constraint tight at optimum)
    double profit_l = 0.0;
    double profit_f = 0.0;
    bool nonpositive_warning = false;  ///< some equilibrium quantity <= 0
};

StackelbergSolution stackelberg_optimum(const StackelbergParams& params);

/// The duopoly as an evaluable bilevel instance: upper variables (q_l, Q),
/// lower variable q_f, profits negated into the suite-wide minimisation
/// convention, demand coupling as an upper-level constraint that is tight at
/// the optimum. Bounds are the price-nonnegativity box [0, alpha/beta].
ProblemInstance stackelberg_problem(const StackelbergParams& params);

}  // namespace smd

#endif  // SMDBENCH_CONSTRUCTION_HPP
