#ifndef SMDBENCH_SOLVER_HPP
#define SMDBENCH_SOLVER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "smdbench/problem.hpp"

namespace smd {

/// How the PCX spread factor ω_η is computed. AsPrinted follows the paper's
/// formula Σ_i m/|x_p^i − w^i| with a per-term floor against division
/// blow-up; MeanAbsDistance uses (1/m)Σ_i |x_p^i − w^i|, the conventional
/// reading under which the operator contracts as the population converges.
enum class PcxOmegaEta { AsPrinted, MeanAbsDistance };

/// Variance-termination normalisation: Normalized divides the sum of
/// variance ratios by the variable count (α = 1 at generation 0), RawSum
/// keeps the printed plain sum.
enum class AlphaNorm { Normalized, RawSum };

struct GAConfig {
    int upper_pop = 30;   ///< N_p
    int lower_pop = 30;   ///< n_p
    int parents = 3;      ///< μ (PCX needs exactly 3)
    int offspring = 3;    ///< λ
    int replacements = 2; ///< r, members replaced per generation
    double p_cross = 0.9;
    double p_mut = 0.1;   ///< per-coordinate mutation probability
    double eta_m = 20.0;  ///< polynomial-mutation distribution index
    double omega_xi = 0.1;
    double alpha_stop_upper = 1e-4;
    double alpha_stop_lower = 1e-5;
    // Safety budgets, generous relative to the benchmark's worst cases.
    long long max_ll_calls = 10'000;
    long long max_ll_evals = 25'000'000;
    long long max_ul_gens = 5'000;
    long long max_ll_gens = 20'000;  ///< per lower-level call
    PcxOmegaEta pcx_omega_eta_upper = PcxOmegaEta::AsPrinted;
    PcxOmegaEta pcx_omega_eta_lower = PcxOmegaEta::MeanAbsDistance;
    AlphaNorm alpha_norm = AlphaNorm::RawSum;

    void validate() const;
};

/// Which optimisation level a fitness comparison refers to.
enum class Level { Upper, Lower };

/// One population member: an upper block paired with the lower block its
/// dedicated lower-level optimisation returned.
struct Individual {
    std::vector<double> upper;  ///< flat (xu1, xu2)
    std::vector<double> lower;  ///< flat (xl1, xl2)
    double F = 0.0;
    double f = 0.0;
    double vG = 0.0;  ///< total upper-constraint violation
    double vg = 0.0;  ///< total lower-constraint violation
    bool evaluated = false;

    /// Violation used for upper-level comparisons. A member whose lower
    /// block violates lower-level constraints is infeasible for the bilevel
    /// problem, so vg is folded in.
    double upper_violation() const noexcept { return vG + vg; }
    bool feasible() const noexcept { return evaluated && vG == 0.0 && vg == 0.0; }
};

enum class StopReason { Alpha, Budget };

const char* to_string(StopReason reason) noexcept;

struct SolveResult {
    Individual best;          ///< best evaluated individual over the whole run
    bool found_any = false;   ///< false only when the budget died before any evaluation
    long long ul_fe = 0;      ///< upper objective evaluations (== ll_calls)
    long long ll_fe = 0;      ///< lower objective evaluations
    long long ll_calls = 0;   ///< lower-level optimisation runs
    long long generations = 0;
    StopReason terminated_by = StopReason::Budget;
    std::uint64_t seed = 0;

    bool feasible() const noexcept { return found_any && best.feasible(); }
};

struct TraceRow {
    long long generation = 0;
    double best_F = 0.0;
    double best_f = 0.0;
    double alpha_upper = 0.0;
    long long ll_fe = 0;
};
using TraceSink = std::function<void(const TraceRow&)>;

/// Outcome of one lower-level optimisation call.
struct LowerResult {
    std::vector<double> lower;  ///< best lower block found
    double f = 0.0;
    double vg = 0.0;
    long long evals = 0;
    long long generations = 0;
};

/// Runs the full nested algorithm: a steady-state real-coded GA over upper
/// vectors, with a complete lower-level GA per new upper vector.
/// Deterministic for fixed (inst, cfg, seed).
SolveResult solve(const ProblemInstance& inst, const GAConfig& cfg, std::uint64_t seed,
                  const TraceSink& trace = {});

/// Lower-level GA for a fixed upper block. A warm block, when given, seeds
/// the n_p-th initial member; the rest are sampled uniformly. Stops on
/// variance collapse, the per-call generation cap, or eval_budget.
LowerResult lower_optimize(const ProblemInstance& inst, std::span<const double> xu_flat,
                           std::optional<std::span<const double>> warm,
                           const GAConfig& cfg, std::mt19937_64& rng,
                           long long eval_budget);

/// Parent-centric crossover child: x_p + ω_ξ(x_p − w) + ω_η(p2 − p1)/2 with
/// w the mean of the three parents, clamped into the box.
std::vector<double> pcx(std::span<const double> index_parent,
                        std::span<const double> p1, std::span<const double> p2,
                        double omega_xi, PcxOmegaEta mode, const Bounds& bounds);

/// Standard polynomial mutation, each coordinate with probability p_mut,
/// clamped into the box.
void poly_mutate(std::span<double> x, const Bounds& bounds, double p_mut, double eta_m,
                 std::mt19937_64& rng);

/// Feasibility-first fitness order at the given level. Better means a wins.
enum class Ordering { Better, Equal, Worse };

Ordering compare(const Individual& a, const Individual& b, Level level);

/// Variance-based termination statistic. Coordinates whose initial variance
/// is below 1e-12 are excluded; with every coordinate excluded the
/// population has fully collapsed and α is 0.
double alpha_ratio(std::span<const double> var_now, std::span<const double> var_init,
                   AlphaNorm norm = AlphaNorm::Normalized);

namespace ga_detail {
/// Pools `incoming` with the population members at `chosen` and writes the
/// best r back over the chosen slots (ties keep the earlier pool entry).
/// Exposed for tests of the replacement step.
void replace_chosen(std::vector<Individual>& population,
                    std::span<const std::size_t> chosen,
                    std::span<const Individual> incoming, Level level);

/// Per-coordinate population variance of the selected block.
std::vector<double> population_variance(const std::vector<Individual>& population,
                                        Level level);
}  // namespace ga_detail

}  // namespace smd

#endif  // SMDBENCH_SOLVER_HPP
