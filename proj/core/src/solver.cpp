#include "smdbench/solver.hpp"
#include <cstdlib>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace smd {

namespace {

thread_local std::mt19937_64* g_pcx_rng = nullptr;
double pcx_dither() {
    if (!g_pcx_rng) return 1.0;
    return std::uniform_real_distribution<double>(0.0, 1.0)(*g_pcx_rng);
}

double unit_draw(std::mt19937_64& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// Partial Fisher-Yates: k distinct indices out of [0, n).
std::vector<std::size_t> sample_distinct(std::size_t n, std::size_t k, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(k);
    return idx;
}

const std::vector<double>& block_of(const Individual& m, Level level) {
    return level == Level::Upper ? m.upper : m.lower;
}

// Disjoint pairwise tournaments over 2μ sampled members; ties go to the
// smaller population index.
std::vector<std::size_t> tournament_winners(const std::vector<Individual>& population,
                                            std::span<const std::size_t> sampled,
                                            Level level) {
    std::vector<std::size_t> winners;
    winners.reserve(sampled.size() / 2);
    for (std::size_t i = 0; i + 1 < sampled.size(); i += 2) {
        const std::size_t a = sampled[i];
        const std::size_t b = sampled[i + 1];
        switch (compare(population[a], population[b], level)) {
            case Ordering::Better: winners.push_back(a); break;
            case Ordering::Worse: winners.push_back(b); break;
            case Ordering::Equal: winners.push_back(std::min(a, b)); break;
        }
    }
    return winners;
}

// Index-parent child per the fixed convention: parent k is the index, the
// other two act as (p1, p2) in selection order.
std::vector<double> make_child(const std::vector<const std::vector<double>*>& parents,
                               std::size_t k, const Bounds& bounds, const GAConfig& cfg,
                               PcxOmegaEta mode, std::mt19937_64& rng) {
    std::vector<double> child;
    g_pcx_rng = &rng;
    if (unit_draw(rng) < cfg.p_cross) {
        const std::size_t a = (k == 0) ? 1 : 0;
        const std::size_t b = (k == 2) ? 1 : 2;
        child = pcx(*parents[k], *parents[a], *parents[b], cfg.omega_xi, mode, bounds);
    } else {
        child = *parents[k];
    }
    poly_mutate(child, bounds, cfg.p_mut, cfg.eta_m, rng);
    return child;
}

}  // namespace

void GAConfig::validate() const {
    if (parents != 3 || offspring != 3) {
        throw std::invalid_argument("GAConfig: PCX requires exactly 3 parents and 3 offspring");
    }
    if (replacements < 1) {
        throw std::invalid_argument("GAConfig: replacements must be >= 1");
    }
    if (replacements > upper_pop || replacements > lower_pop) {
        throw std::invalid_argument("GAConfig: replacements must not exceed population size");
    }
    if (upper_pop < 2 * parents || lower_pop < 2 * parents) {
        throw std::invalid_argument("GAConfig: population sizes must be >= 2*parents");
    }
    if (p_cross < 0.0 || p_cross > 1.0 || p_mut < 0.0 || p_mut > 1.0) {
        throw std::invalid_argument("GAConfig: probabilities must lie in [0, 1]");
    }
    if (!(alpha_stop_upper > 0.0) || !(alpha_stop_lower > 0.0)) {
        throw std::invalid_argument("GAConfig: alpha thresholds must be positive");
    }
    if (eta_m <= 0.0) {
        throw std::invalid_argument("GAConfig: eta_m must be positive");
    }
    if (max_ll_calls < 0 || max_ll_evals < 0 || max_ul_gens < 0 || max_ll_gens < 0) {
        throw std::invalid_argument("GAConfig: budgets must be non-negative");
    }
}

const char* to_string(StopReason reason) noexcept {
    return reason == StopReason::Alpha ? "alpha" : "budget";
}

std::vector<double> pcx(std::span<const double> index_parent, std::span<const double> p1,
                        std::span<const double> p2, double omega_xi, PcxOmegaEta mode,
                        const Bounds& bounds) {
    const std::size_t m = index_parent.size();
    if (p1.size() != m || p2.size() != m) {
        detail::throw_length_mismatch("pcx: parent", std::min(p1.size(), p2.size()), m);
    }
    if (bounds.size() != m) {
        detail::throw_length_mismatch("pcx: bounds", bounds.size(), m);
    }

    std::vector<double> child(m);
    std::vector<double> d(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double w = (index_parent[i] + p1[i] + p2[i]) / 3.0;
        d[i] = index_parent[i] - w;
    }
    double omega_eta = 0.0;
    if (mode == PcxOmegaEta::AsPrinted) {
        for (std::size_t i = 0; i < m; ++i) {
            const double floor_i = 1e-10 * bounds[i].width();
            omega_eta += static_cast<double>(m) / std::max(std::abs(d[i]), floor_i);
        }
    } else {
        double scale = 1.0;
        if (const char* env = getenv("PCX_ETA")) scale = atof(env);
        for (std::size_t i = 0; i < m; ++i) omega_eta += std::abs(d[i]);
        omega_eta /= static_cast<double>(m);
        if (scale > 0) omega_eta = scale * pcx_dither();  // experiment
    }
    for (std::size_t i = 0; i < m; ++i) {
        child[i] = index_parent[i] + omega_xi * d[i] + omega_eta * (p2[i] - p1[i]) / 2.0;
        child[i] = bounds[i].clamp(child[i]);
    }
    return child;
}

void poly_mutate(std::span<double> x, const Bounds& bounds, double p_mut, double eta_m,
                 std::mt19937_64& rng) {
    if (x.size() != bounds.size()) {
        detail::throw_length_mismatch("poly_mutate: vector", x.size(), bounds.size());
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (unit_draw(rng) >= p_mut) continue;
        const double u = unit_draw(rng);
        const double exponent = 1.0 / (eta_m + 1.0);
        const double delta = u < 0.5 ? std::pow(2.0 * u, exponent) - 1.0
                                     : 1.0 - std::pow(2.0 * (1.0 - u), exponent);
        x[i] = bounds[i].clamp(x[i] + delta * bounds[i].width());
    }
}

Ordering compare(const Individual& a, const Individual& b, Level level) {
    if (!a.evaluated || !b.evaluated) {
        throw std::logic_error("compare: individual has not been evaluated at this level");
    }
    const double va = level == Level::Upper ? a.upper_violation() : a.vg;
    const double vb = level == Level::Upper ? b.upper_violation() : b.vg;
    if (va == 0.0 && vb > 0.0) return Ordering::Better;
    if (va > 0.0 && vb == 0.0) return Ordering::Worse;
    if (va > 0.0 && vb > 0.0) {
        if (va < vb) return Ordering::Better;
        if (va > vb) return Ordering::Worse;
        return Ordering::Equal;
    }
    const double fa = level == Level::Upper ? a.F : a.f;
    const double fb = level == Level::Upper ? b.F : b.f;
    if (fa < fb) return Ordering::Better;
    if (fa > fb) return Ordering::Worse;
    return Ordering::Equal;
}

double alpha_ratio(std::span<const double> var_now, std::span<const double> var_init,
                   AlphaNorm norm) {
    if (var_now.size() != var_init.size()) {
        detail::throw_length_mismatch("alpha_ratio: variance vector", var_now.size(),
                                      var_init.size());
    }
    constexpr double kEpsVar = 1e-12;
    double sum = 0.0;
    std::size_t included = 0;
    for (std::size_t i = 0; i < var_now.size(); ++i) {
        if (var_init[i] < kEpsVar) continue;
        sum += var_now[i] / var_init[i];
        ++included;
    }
    if (included == 0) return 0.0;
    return norm == AlphaNorm::Normalized ? sum / static_cast<double>(included) : sum;
}

namespace ga_detail {

std::vector<double> population_variance(const std::vector<Individual>& population,
                                        Level level) {
    const std::size_t dim = block_of(population.front(), level).size();
    const double n = static_cast<double>(population.size());
    std::vector<double> mean(dim, 0.0);
    for (const Individual& m : population) {
        const std::vector<double>& x = block_of(m, level);
        for (std::size_t i = 0; i < dim; ++i) mean[i] += x[i];
    }
    for (double& v : mean) v /= n;
    std::vector<double> var(dim, 0.0);
    for (const Individual& m : population) {
        const std::vector<double>& x = block_of(m, level);
        for (std::size_t i = 0; i < dim; ++i) {
            const double diff = x[i] - mean[i];
            var[i] += diff * diff;
        }
    }
    for (double& v : var) v /= n;
    return var;
}

void replace_chosen(std::vector<Individual>& population,
                    std::span<const std::size_t> chosen,
                    std::span<const Individual> incoming, Level level) {
    std::vector<Individual> pool;
    pool.reserve(chosen.size() + incoming.size());
    for (std::size_t idx : chosen) pool.push_back(population[idx]);
    pool.insert(pool.end(), incoming.begin(), incoming.end());
    std::stable_sort(pool.begin(), pool.end(), [level](const Individual& a, const Individual& b) {
        return compare(a, b, level) == Ordering::Better;
    });
    for (std::size_t i = 0; i < chosen.size(); ++i) {
        population[chosen[i]] = pool[i];
    }
}

}  // namespace ga_detail

LowerResult lower_optimize(const ProblemInstance& inst, std::span<const double> xu_flat,
                           std::optional<std::span<const double>> warm,
                           const GAConfig& cfg, std::mt19937_64& rng,
                           long long eval_budget) {
    cfg.validate();
    const Dims& d = inst.dims;
    if (xu_flat.size() != static_cast<std::size_t>(d.upper())) {
        detail::throw_length_mismatch("lower_optimize: xu", xu_flat.size(),
                                      static_cast<std::size_t>(d.upper()));
    }
    if (!inst.upper_bounds.contains(xu_flat)) {
        throw std::domain_error(inst.name + ": lower_optimize called with xu outside bounds");
    }

    BilevelVector ws;
    ws.xu1.assign(xu_flat.begin(), xu_flat.begin() + d.p);
    ws.xu2.assign(xu_flat.begin() + d.p, xu_flat.end());
    ws.xl1.resize(static_cast<std::size_t>(d.q + d.s));
    ws.xl2.resize(static_cast<std::size_t>(d.r));
    std::vector<double> gbuf(inst.lower_constraint_count());

    LowerResult result;
    const auto eval_member = [&](Individual& m) {
        const std::size_t split_at = ws.xl1.size();
        std::copy(m.lower.begin(), m.lower.begin() + split_at, ws.xl1.begin());
        std::copy(m.lower.begin() + split_at, m.lower.end(), ws.xl2.begin());
        m.f = inst.lower_value(ws, gbuf);
        m.vg = total_violation(gbuf);
        m.evaluated = true;
        ++result.evals;
    };

    const std::size_t n_p = static_cast<std::size_t>(cfg.lower_pop);
    std::vector<Individual> population;
    population.reserve(n_p);
    const std::size_t n_random = warm ? n_p - 1 : n_p;
    for (std::size_t i = 0; i < n_random; ++i) {
        Individual m;
        m.lower = inst.lower_bounds.sample(rng);
        eval_member(m);
        population.push_back(std::move(m));
    }
    if (warm) {
        Individual m;
        m.lower = clamp_to_bounds(*warm, inst.lower_bounds);
        eval_member(m);
        population.push_back(std::move(m));
    }

    Individual best = population[0];
    for (std::size_t i = 1; i < population.size(); ++i) {
        if (compare(population[i], best, Level::Lower) == Ordering::Better) {
            best = population[i];
        }
    }

    const std::vector<double> var_init = ga_detail::population_variance(population, Level::Lower);

    std::vector<Individual> offspring(static_cast<std::size_t>(cfg.offspring));
    while (result.generations < cfg.max_ll_gens &&
           result.evals + cfg.offspring <= eval_budget) {
        const auto sampled =
            sample_distinct(population.size(), static_cast<std::size_t>(2 * cfg.parents), rng);
        const auto winners = tournament_winners(population, sampled, Level::Lower);
        const std::vector<const std::vector<double>*> parents = {
            &population[winners[0]].lower, &population[winners[1]].lower,
            &population[winners[2]].lower};

        for (std::size_t k = 0; k < offspring.size(); ++k) {
            Individual child;
            child.lower = make_child(parents, k, inst.lower_bounds, cfg,
                                     cfg.pcx_omega_eta_lower, rng);
            eval_member(child);
            if (compare(child, best, Level::Lower) == Ordering::Better) best = child;
            offspring[k] = std::move(child);
        }

        const auto chosen =
            sample_distinct(population.size(), static_cast<std::size_t>(cfg.replacements), rng);
        ga_detail::replace_chosen(population, chosen, offspring, Level::Lower);
        ++result.generations;

        const std::vector<double> var_now =
            ga_detail::population_variance(population, Level::Lower);
        if (alpha_ratio(var_now, var_init, cfg.alpha_norm) < cfg.alpha_stop_lower) break;
    }

    result.lower = best.lower;
    result.f = best.f;
    result.vg = best.vg;
    return result;
}

SolveResult solve(const ProblemInstance& inst, const GAConfig& cfg, std::uint64_t seed,
                  const TraceSink& trace) {
    cfg.validate();
    inst.dims.validate();
    std::mt19937_64 rng(seed);

    SolveResult res;
    res.seed = seed;

    const Dims& d = inst.dims;
    BilevelVector ws;
    ws.xu1.resize(static_cast<std::size_t>(d.p));
    ws.xu2.resize(static_cast<std::size_t>(d.r));
    ws.xl1.resize(static_cast<std::size_t>(d.q + d.s));
    ws.xl2.resize(static_cast<std::size_t>(d.r));
    std::vector<double> Gbuf(inst.upper_constraint_count());

    const auto evaluate_upper = [&](Individual& m) {
        std::copy(m.upper.begin(), m.upper.begin() + d.p, ws.xu1.begin());
        std::copy(m.upper.begin() + d.p, m.upper.end(), ws.xu2.begin());
        std::copy(m.lower.begin(), m.lower.begin() + d.q + d.s, ws.xl1.begin());
        std::copy(m.lower.begin() + d.q + d.s, m.lower.end(), ws.xl2.begin());
        m.F = inst.upper_value(ws, Gbuf);
        m.vG = total_violation(Gbuf);
        m.evaluated = true;
        ++res.ul_fe;
        if (!res.found_any || compare(m, res.best, Level::Upper) == Ordering::Better) {
            res.best = m;
            res.found_any = true;
        }
    };

    const auto remaining_ll_evals = [&] { return cfg.max_ll_evals - res.ll_fe; };
    const auto can_call_lower = [&] {
        return res.ll_calls < cfg.max_ll_calls && remaining_ll_evals() >= cfg.lower_pop;
    };
    const auto run_lower = [&](const std::vector<double>& upper,
                               std::optional<std::span<const double>> warm) {
        LowerResult lr = lower_optimize(inst, upper, warm, cfg, rng, remaining_ll_evals());
        ++res.ll_calls;
        res.ll_fe += lr.evals;
        return lr;
    };

    // Step 1: random upper population, each member completed by a cold-start
    // lower-level optimisation.
    std::vector<Individual> population;
    population.reserve(static_cast<std::size_t>(cfg.upper_pop));
    bool budget_hit = false;
    for (int i = 0; i < cfg.upper_pop; ++i) {
        if (!can_call_lower()) {
            budget_hit = true;
            break;
        }
        Individual m;
        m.upper = inst.upper_bounds.sample(rng);
        LowerResult lr = run_lower(m.upper, std::nullopt);
        m.lower = std::move(lr.lower);
        m.f = lr.f;
        m.vg = lr.vg;
        evaluate_upper(m);
        population.push_back(std::move(m));
    }
    if (budget_hit || population.size() < static_cast<std::size_t>(cfg.upper_pop)) {
        res.terminated_by = StopReason::Budget;
        return res;
    }

    const std::vector<double> var_init = ga_detail::population_variance(population, Level::Upper);

    const auto closest_member_lower = [&](const std::vector<double>& upper) {
        std::size_t best_i = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < population.size(); ++i) {
            double dist = 0.0;
            for (std::size_t c = 0; c < upper.size(); ++c) {
                const double diff = population[i].upper[c] - upper[c];
                dist += diff * diff;
            }
            if (dist < best_dist) {
                best_dist = dist;
                best_i = i;
            }
        }
        return std::span<const double>(population[best_i].lower);
    };

    std::vector<Individual> offspring;
    offspring.reserve(static_cast<std::size_t>(cfg.offspring));
    for (long long gen = 1; gen <= cfg.max_ul_gens; ++gen) {
        if (!can_call_lower()) {
            budget_hit = true;
            break;
        }

        // Step 2: tournament over 2μ members sampled without replacement.
        const auto sampled =
            sample_distinct(population.size(), static_cast<std::size_t>(2 * cfg.parents), rng);
        const auto winners = tournament_winners(population, sampled, Level::Upper);
        const std::vector<const std::vector<double>*> parents = {
            &population[winners[0]].upper, &population[winners[1]].upper,
            &population[winners[2]].upper};

        // Steps 3-5: offspring upper blocks, one full lower-level
        // optimisation each (warm-started), then upper evaluation.
        offspring.clear();
        for (int k = 0; k < cfg.offspring; ++k) {
            if (!can_call_lower()) {
                budget_hit = true;
                break;
            }
            Individual child;
            child.upper = make_child(parents, static_cast<std::size_t>(k),
                                     inst.upper_bounds, cfg, cfg.pcx_omega_eta_upper, rng);
            LowerResult lr = run_lower(child.upper, closest_member_lower(child.upper));
            child.lower = std::move(lr.lower);
            child.f = lr.f;
            child.vg = lr.vg;
            evaluate_upper(child);
            offspring.push_back(std::move(child));
        }

        // Step 6: pool the offspring with r random members; the best r of
        // the pool replace the chosen members.
        if (!offspring.empty()) {
            const auto chosen = sample_distinct(population.size(),
                                                static_cast<std::size_t>(cfg.replacements), rng);
            ga_detail::replace_chosen(population, chosen, offspring, Level::Upper);
        }
        res.generations = gen;

        // Step 7: variance-based termination.
        const std::vector<double> var_now =
            ga_detail::population_variance(population, Level::Upper);
        const double alpha = alpha_ratio(var_now, var_init, cfg.alpha_norm);
        if (trace) {
            trace(TraceRow{gen, res.best.F, res.best.f, alpha, res.ll_fe});
        }
        if (alpha < cfg.alpha_stop_upper) {
            res.terminated_by = StopReason::Alpha;
            return res;
        }
        if (budget_hit) break;
    }
    res.terminated_by = StopReason::Budget;
    return res;
}

}  // namespace smd
