#include "smdbench/suite.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace smd {

namespace {

using std::numbers::e;
using std::numbers::pi;

constexpr Interval kWideBox{-5.0, 10.0};

double sq(double x) { return x * x; }
double cube(double x) { return x * x * x; }

double sum_sq(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

double sum_sq_shift(std::span<const double> x, double c) {
    double s = 0.0;
    for (double v : x) s += sq(v - c);
    return s;
}

// q + Σ (x_i^2 − cos 2πx_i); zero exactly at the origin.
double rastrigin_block(std::span<const double> x) {
    double s = static_cast<double>(x.size());
    for (double v : x) s += v * v - std::cos(2.0 * pi * v);
    return s;
}

// Σ [(x_{i+1} − x_i^2)^2 + (x_i − 1)^2]; zero exactly at all-ones.
double rosenbrock_block(std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        s += sq(x[i + 1] - sq(x[i])) + sq(x[i] - 1.0);
    }
    return s;
}

// Σ over stride-2 pairs (x_{k+1} − x_k)^2 of the extra xl1 block.
double pair_diff_block(std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); i += 2) {
        s += sq(x[i + 1] - x[i]);
    }
    return s;
}

double griewank_block(std::span<const double> x) {
    double s = 1.0;
    double prod = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += x[i] * x[i] / 400.0;
        prod *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
    }
    return s - prod;
}

double ackley_block(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    double ss = 0.0;
    double sc = 0.0;
    for (double v : x) {
        ss += v * v;
        sc += std::cos(2.0 * pi * v);
    }
    return 20.0 + e - 20.0 * std::exp(-0.2 * std::sqrt(ss / n)) - std::exp(sc / n);
}

// Cubic interaction constraint x_j − Σ_{i≠j} x_i^3 − extra ≥ 0.
double cubic_constraint(std::span<const double> block, std::size_t j, double extra) {
    double s = 0.0;
    for (std::size_t i = 0; i < block.size(); ++i) {
        if (i != j) s += cube(block[i]);
    }
    return block[j] - s - extra;
}

double sum_cubes(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += cube(v);
    return s;
}

void require(bool ok, ProblemId id, const std::string& rule) {
    if (!ok) {
        throw std::invalid_argument(std::string(to_string(id)) +
                                    ": invalid dims, rule violated: " + rule);
    }
}

Bounds block_bounds(int n1, Interval b1, int n2, Interval b2) {
    return Bounds::concat(Bounds::uniform(static_cast<std::size_t>(n1), b1),
                          Bounds::uniform(static_cast<std::size_t>(n2), b2));
}

std::vector<double> filled(int n, double value) {
    return std::vector<double>(static_cast<std::size_t>(n), value);
}

void validate_dims(ProblemId id, const Dims& d) {
    d.validate();
    require(d.r >= 1, id, "r >= 1 (interaction terms exist)");
    if (id == ProblemId::SMD6) {
        require(d.s >= 2 && d.s % 2 == 0, id, "s >= 2 and even (paired valley terms)");
    } else {
        require(d.s == 0, id, "s == 0 (extra xl1 block is specific to SMD6)");
    }
    switch (id) {
        case ProblemId::SMD5:
        case ProblemId::SMD8:
        case ProblemId::SMD10:
        case ProblemId::SMD12:
            require(d.q >= 2, id, "q >= 2 (formulas contain q-1 terms)");
            break;
        case ProblemId::SMD6:
            break;
        default:
            require(d.q >= 1, id, "q >= 1");
            break;
    }
    if (id == ProblemId::SMD8) {
        require(d.p >= 1, id, "p >= 1 (upper objective averages over p)");
    }
    if (id == ProblemId::SMD10 || id == ProblemId::SMD12) {
        require(d.upper() >= 2, id, "p + r >= 2 (optimum uses 1/sqrt(p+r-1))");
    }
}

PsiReference simple_psi(std::vector<double> xl1, std::vector<double> xl2) {
    PsiReference psi;
    psi.xl1 = std::move(xl1);
    psi.xl2 = std::move(xl2);
    psi.is_unique = true;
    return psi;
}

}  // namespace

ProblemInstance instantiate(ProblemId id, const Dims& dims) {
    validate_dims(id, dims);

    const int p = dims.p;
    const int q = dims.q;
    const int r = dims.r;
    const int s = dims.s;

    ProblemInstance inst;
    inst.name = to_string(id);
    inst.id = id;
    inst.dims = dims;

    switch (id) {
        case ProblemId::SMD1: {
            inst.upper_bounds = block_bounds(p, kWideBox, r, kWideBox);
            inst.lower_bounds =
                block_bounds(q, kWideBox, r, Interval{-pi / 2.0, pi / 2.0, true, true});
            inst.properties.cooperative = true;
            inst.upper_objective = [](const BilevelVector& v) {
                double F3 = sum_sq(v.xu2);
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    F3 += sq(v.xu2[i] - std::tan(v.xl2[i]));
                }
                return sum_sq(v.xu1) + sum_sq(v.xl1) + F3;
            };
            inst.lower_objective = [](const BilevelVector& v) {
                double f3 = 0.0;
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    f3 += sq(v.xu2[i] - std::tan(v.xl2[i]));
                }
                return sum_sq(v.xu1) + sum_sq(v.xl1) + f3;
            };
            inst.psi_fn = [q](std::span<const double>, std::span<const double> xu2) {
                std::vector<double> xl2(xu2.size());
                for (std::size_t i = 0; i < xu2.size(); ++i) xl2[i] = std::atan(xu2[i]);
                return simple_psi(filled(q, 0.0), std::move(xl2));
            };
            inst.optimum = OptimumRecord{
                BilevelVector{filled(p, 0.0), filled(r, 0.0), filled(q, 0.0), filled(r, 0.0)},
                0.0, 0.0};
            break;
        }

        case ProblemId::SMD2: {
            inst.upper_bounds = block_bounds(p, kWideBox, r, Interval{-5.0, 1.0});
            inst.lower_bounds = block_bounds(q, kWideBox, r, Interval{0.0, e, true, false});
            inst.properties.conflicting = true;
            inst.upper_objective = [](const BilevelVector& v) {
                double F3 = sum_sq(v.xu2);
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    F3 -= sq(v.xu2[i] - std::log(v.xl2[i]));
                }
                return sum_sq(v.xu1) - sum_sq(v.xl1) + F3;
            };
            inst.lower_objective = [](const BilevelVector& v) {
                double f3 = 0.0;
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    f3 += sq(v.xu2[i] - std::log(v.xl2[i]));
                }
                return sum_sq(v.xu1) + sum_sq(v.xl1) + f3;
            };
            inst.psi_fn = [q](std::span<const double>, std::span<const double> xu2) {
                std::vector<double> xl2(xu2.size());
                for (std::size_t i = 0; i < xu2.size(); ++i) xl2[i] = std::exp(xu2[i]);
                return simple_psi(filled(q, 0.0), std::move(xl2));
            };
            inst.optimum = OptimumRecord{
                BilevelVector{filled(p, 0.0), filled(r, 0.0), filled(q, 0.0), filled(r, 1.0)},
                0.0, 0.0};
            break;
        }

        case ProblemId::SMD3: {
            inst.upper_bounds = block_bounds(p, kWideBox, r, kWideBox);
            inst.lower_bounds =
                block_bounds(q, kWideBox, r, Interval{-pi / 2.0, pi / 2.0, true, true});
            inst.properties.cooperative = true;
            inst.properties.lower_multimodal = true;
            inst.upper_objective = [](const BilevelVector& v) {
                double F3 = sum_sq(v.xu2);
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    F3 += sq(sq(v.xu2[i]) - std::tan(v.xl2[i]));
                }
                return sum_sq(v.xu1) + sum_sq(v.xl1) + F3;
            };
            inst.lower_objective = [](const BilevelVector& v) {
                double f3 = 0.0;
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    f3 += sq(sq(v.xu2[i]) - std::tan(v.xl2[i]));
                }
                return sum_sq(v.xu1) + rastrigin_block(v.xl1) + f3;
            };
            inst.psi_fn = [q](std::span<const double>, std::span<const double> xu2) {
                std::vector<double> xl2(xu2.size());
                for (std::size_t i = 0; i < xu2.size(); ++i) xl2[i] = std::atan(sq(xu2[i]));
                return simple_psi(filled(q, 0.0), std::move(xl2));
            };
            inst.optimum = OptimumRecord{
                BilevelVector{filled(p, 0.0), filled(r, 0.0), filled(q, 0.0), filled(r, 0.0)},
                0.0, 0.0};
            break;
        }

        case ProblemId::SMD4: {
            inst.upper_bounds = block_bounds(p, kWideBox, r, Interval{-1.0, 1.0});
            inst.lower_bounds = block_bounds(q, kWideBox, r, Interval{0.0, e});
            inst.properties.conflicting = true;
            inst.properties.lower_multimodal = true;
            inst.upper_objective = [](const BilevelVector& v) {
                double F3 = sum_sq(v.xu2);
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    F3 -= sq(std::abs(v.xu2[i]) - std::log(1.0 + v.xl2[i]));
                }
                return sum_sq(v.xu1) - sum_sq(v.xl1) + F3;
            };
            inst.lower_objective = [](const BilevelVector& v) {
                double f3 = 0.0;
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    f3 += sq(std::abs(v.xu2[i]) - std::log(1.0 + v.xl2[i]));
                }
                return sum_sq(v.xu1) + rastrigin_block(v.xl1) + f3;
            };
            inst.psi_fn = [q](std::span<const double>, std::span<const double> xu2) {
                std::vector<double> xl2(xu2.size());
                for (std::size_t i = 0; i < xu2.size(); ++i) {
                    xl2[i] = std::exp(std::abs(xu2[i])) - 1.0;
                }
                return simple_psi(filled(q, 0.0), std::move(xl2));
            };
            inst.optimum = OptimumRecord{
                BilevelVector{filled(p, 0.0), filled(r, 0.0), filled(q, 0.0), filled(r, 0.0)},
                0.0, 0.0};
            break;
        }

        case ProblemId::SMD5: {
            inst.upper_bounds = block_bounds(p, kWideBox, r, kWideBox);
            inst.lower_bounds = block_bounds(q, kWideBox, r, kWideBox);
            inst.properties.conflicting = true;
            inst.properties.lower_multimodal = true;
            inst.upper_objective = [](const BilevelVector& v) {
                double F3 = sum_sq(v.xu2);
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    F3 -= sq(std::abs(v.xu2[i]) - sq(v.xl2[i]));
                }
                return sum_sq(v.xu1) - rosenbrock_block(v.xl1) + F3;
            };
            inst.lower_objective = [](const BilevelVector& v) {
                double f3 = 0.0;
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    f3 += sq(std::abs(v.xu2[i]) - sq(v.xl2[i]));
                }
                return sum_sq(v.xu1) + rosenbrock_block(v.xl1) + f3;
            };
            inst.psi_fn = [q](std::span<const double>, std::span<const double> xu2) {
                std::vector<double> xl2(xu2.size());
                for (std::size_t i = 0; i < xu2.size(); ++i) {
                    xl2[i] = std::sqrt(std::abs(xu2[i]));
                }
                return simple_psi(filled(q, 1.0), std::move(xl2));
            };
            inst.optimum = OptimumRecord{
                BilevelVector{filled(p, 0.0), filled(r, 0.0), filled(q, 1.0), filled(r, 0.0)},
                0.0, 0.0};
            break;
        }

        case ProblemId::SMD6: {
            inst.upper_bounds = block_bounds(p, kWideBox, r, kWideBox);
            inst.lower_bounds = block_bounds(q + s, kWideBox, r, kWideBox);
            inst.properties.conflicting = true;
            inst.properties.multi_global_lower = true;
            inst.upper_objective = [q](const BilevelVector& v) {
                std::span<const double> head(v.xl1.data(), static_cast<std::size_t>(q));
                std::span<const double> extra(v.xl1.data() + q, v.xl1.size() - q);
                double F3 = sum_sq(v.xu2);
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    F3 -= sq(v.xu2[i] - v.xl2[i]);
                }
                return sum_sq(v.xu1) - sum_sq(head) + sum_sq(extra) + F3;
            };
            inst.lower_objective = [q](const BilevelVector& v) {
                std::span<const double> head(v.xl1.data(), static_cast<std::size_t>(q));
                std::span<const double> extra(v.xl1.data() + q, v.xl1.size() - q);
                double f3 = 0.0;
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    f3 += sq(v.xu2[i] - v.xl2[i]);
                }
                return sum_sq(v.xu1) + sum_sq(head) + pair_diff_block(extra) + f3;
            };
            inst.psi_fn = [q, s](std::span<const double>, std::span<const double> xu2) {
                PsiReference psi;
                psi.xl1 = filled(q + s, 0.0);
                psi.xl2.assign(xu2.begin(), xu2.end());
                psi.is_unique = false;
                std::vector<double> xu2_copy(xu2.begin(), xu2.end());
                psi.set_residual = [q, xu2_copy](std::span<const double> xl1,
                                                 std::span<const double> xl2) {
                    double h = 0.0;
                    for (int i = 0; i < q; ++i) h += sq(xl1[i]);
                    std::span<const double> extra(xl1.data() + q, xl1.size() - q);
                    h += pair_diff_block(extra);
                    for (std::size_t i = 0; i < xl2.size(); ++i) {
                        h += sq(xl2[i] - xu2_copy[i]);
                    }
                    return h;
                };
                return psi;
            };
            inst.optimum = OptimumRecord{
                BilevelVector{filled(p, 0.0), filled(r, 0.0), filled(q + s, 0.0),
                              filled(r, 0.0)},
                0.0, 0.0};
            break;
        }

        case ProblemId::SMD7: {
            inst.upper_bounds = block_bounds(p, kWideBox, r, Interval{-5.0, 1.0});
            inst.lower_bounds = block_bounds(q, kWideBox, r, Interval{0.0, e, true, false});
            inst.properties.conflicting = true;
            inst.properties.upper_multimodal = true;
            inst.upper_objective = [](const BilevelVector& v) {
                double F3 = sum_sq(v.xu2);
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    F3 -= sq(v.xu2[i] - std::log(v.xl2[i]));
                }
                return griewank_block(v.xu1) - sum_sq(v.xl1) + F3;
            };
            inst.lower_objective = [](const BilevelVector& v) {
                double f3 = 0.0;
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    f3 += sq(v.xu2[i] - std::log(v.xl2[i]));
                }
                return sum_cubes(v.xu1) + sum_sq(v.xl1) + f3;
            };
            inst.psi_fn = [q](std::span<const double>, std::span<const double> xu2) {
                std::vector<double> xl2(xu2.size());
                for (std::size_t i = 0; i < xu2.size(); ++i) xl2[i] = std::exp(xu2[i]);
                return simple_psi(filled(q, 0.0), std::move(xl2));
            };
            inst.optimum = OptimumRecord{
                BilevelVector{filled(p, 0.0), filled(r, 0.0), filled(q, 0.0), filled(r, 1.0)},
                0.0, 0.0};
            break;
        }

        case ProblemId::SMD8: {
            inst.upper_bounds = block_bounds(p, kWideBox, r, kWideBox);
            inst.lower_bounds = block_bounds(q, kWideBox, r, kWideBox);
            inst.properties.conflicting = true;
            inst.properties.upper_multimodal = true;
            inst.upper_objective = [](const BilevelVector& v) {
                double F3 = sum_sq(v.xu2);
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    F3 -= sq(v.xu2[i] - cube(v.xl2[i]));
                }
                return ackley_block(v.xu1) - rosenbrock_block(v.xl1) + F3;
            };
            inst.lower_objective = [](const BilevelVector& v) {
                double f1 = 0.0;
                for (double x : v.xu1) f1 += std::abs(x);
                double f3 = 0.0;
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    f3 += sq(v.xu2[i] - cube(v.xl2[i]));
                }
                return f1 + rosenbrock_block(v.xl1) + f3;
            };
            inst.psi_fn = [q](std::span<const double>, std::span<const double> xu2) {
                std::vector<double> xl2(xu2.size());
                for (std::size_t i = 0; i < xu2.size(); ++i) xl2[i] = std::cbrt(xu2[i]);
                return simple_psi(filled(q, 1.0), std::move(xl2));
            };
            inst.optimum = OptimumRecord{
                BilevelVector{filled(p, 0.0), filled(r, 0.0), filled(q, 1.0), filled(r, 0.0)},
                0.0, 0.0};
            break;
        }

        case ProblemId::SMD9: {
            inst.upper_bounds = block_bounds(p, kWideBox, r, Interval{-5.0, 1.0});
            inst.lower_bounds =
                block_bounds(q, kWideBox, r, Interval{-1.0, e - 1.0, true, false});
            inst.properties.conflicting = true;
            inst.properties.constrained = true;
            inst.upper_objective = [](const BilevelVector& v) {
                double F3 = sum_sq(v.xu2);
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    F3 -= sq(v.xu2[i] - std::log(1.0 + v.xl2[i]));
                }
                return sum_sq(v.xu1) - sum_sq(v.xl1) + F3;
            };
            inst.lower_objective = [](const BilevelVector& v) {
                double f3 = 0.0;
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    f3 += sq(v.xu2[i] - std::log(1.0 + v.xl2[i]));
                }
                return sum_sq(v.xu1) + sum_sq(v.xl1) + f3;
            };
            inst.upper_scopes = {ConstraintScope::UpperVars};
            inst.upper_constraint_fn = [](const BilevelVector& v, std::span<double> G) {
                constexpr double a = 1.0, b = 1.0;
                const double su = (sum_sq(v.xu1) + sum_sq(v.xu2)) / a;
                G[0] = su - std::floor(su + 0.5 / b);
            };
            inst.lower_scopes = {ConstraintScope::LowerVars};
            inst.lower_constraint_fn = [](const BilevelVector& v, std::span<double> g) {
                constexpr double a = 1.0, b = 1.0;
                const double sl = (sum_sq(v.xl1) + sum_sq(v.xl2)) / a;
                g[0] = sl - std::floor(sl + 0.5 / b);
            };
            inst.psi_fn = [q](std::span<const double>, std::span<const double> xu2) {
                std::vector<double> xl2(xu2.size());
                for (std::size_t i = 0; i < xu2.size(); ++i) {
                    xl2[i] = std::exp(xu2[i]) - 1.0;
                }
                return simple_psi(filled(q, 0.0), std::move(xl2));
            };
            inst.optimum = OptimumRecord{
                BilevelVector{filled(p, 0.0), filled(r, 0.0), filled(q, 0.0), filled(r, 0.0)},
                0.0, 0.0};
            break;
        }

        case ProblemId::SMD10: {
            inst.upper_bounds = block_bounds(p, kWideBox, r, kWideBox);
            inst.lower_bounds =
                block_bounds(q, kWideBox, r, Interval{-pi / 2.0, pi / 2.0, true, true});
            inst.properties.conflicting = true;
            inst.properties.constrained = true;
            inst.upper_objective = [](const BilevelVector& v) {
                double F3 = sum_sq_shift(v.xu2, 2.0);
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    F3 -= sq(v.xu2[i] - std::tan(v.xl2[i]));
                }
                return sum_sq_shift(v.xu1, 2.0) + sum_sq(v.xl1) + F3;
            };
            inst.lower_objective = [](const BilevelVector& v) {
                double f3 = 0.0;
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    f3 += sq(v.xu2[i] - std::tan(v.xl2[i]));
                }
                return sum_sq(v.xu1) + sum_sq_shift(v.xl1, 2.0) + f3;
            };
            inst.upper_scopes.assign(static_cast<std::size_t>(p + r),
                                     ConstraintScope::UpperVars);
            inst.upper_constraint_fn = [p, r](const BilevelVector& v, std::span<double> G) {
                const double cu1 = sum_cubes(v.xu1);
                const double cu2 = sum_cubes(v.xu2);
                for (int j = 0; j < p; ++j) {
                    G[j] = cubic_constraint(v.xu1, static_cast<std::size_t>(j), cu2);
                }
                for (int j = 0; j < r; ++j) {
                    G[p + j] = cubic_constraint(v.xu2, static_cast<std::size_t>(j), cu1);
                }
            };
            inst.lower_scopes.assign(static_cast<std::size_t>(q), ConstraintScope::LowerVars);
            inst.lower_constraint_fn = [q](const BilevelVector& v, std::span<double> g) {
                for (int j = 0; j < q; ++j) {
                    g[j] = cubic_constraint(v.xl1, static_cast<std::size_t>(j), 0.0);
                }
            };
            const double cl = 1.0 / std::sqrt(static_cast<double>(q - 1));
            inst.psi_fn = [q, cl](std::span<const double>, std::span<const double> xu2) {
                std::vector<double> xl2(xu2.size());
                for (std::size_t i = 0; i < xu2.size(); ++i) xl2[i] = std::atan(xu2[i]);
                return simple_psi(filled(q, cl), std::move(xl2));
            };
            const double cu = 1.0 / std::sqrt(static_cast<double>(p + r - 1));
            std::vector<double> xl2_star(static_cast<std::size_t>(r), std::atan(cu));
            inst.optimum = OptimumRecord{
                BilevelVector{filled(p, cu), filled(r, cu), filled(q, cl), xl2_star},
                p * sq(cu - 2.0) + q * sq(cl) + r * sq(cu - 2.0),
                p * sq(cu) + q * sq(cl - 2.0)};
            break;
        }

        case ProblemId::SMD11: {
            inst.upper_bounds = block_bounds(p, kWideBox, r, Interval{-1.0, 1.0});
            inst.lower_bounds = block_bounds(q, kWideBox, r, Interval{1.0 / e, e});
            inst.properties.conflicting = true;
            inst.properties.constrained = true;
            inst.properties.multi_global_lower = true;
            inst.upper_objective = [](const BilevelVector& v) {
                double F3 = sum_sq(v.xu2);
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    F3 -= sq(v.xu2[i] - std::log(v.xl2[i]));
                }
                return sum_sq(v.xu1) - sum_sq(v.xl1) + F3;
            };
            inst.lower_objective = [](const BilevelVector& v) {
                double f3 = 0.0;
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    f3 += sq(v.xu2[i] - std::log(v.xl2[i]));
                }
                return sum_sq(v.xu1) + sum_sq(v.xl1) + f3;
            };
            const double inv_sqrt_r = 1.0 / std::sqrt(static_cast<double>(r));
            inst.upper_scopes.assign(static_cast<std::size_t>(r), ConstraintScope::BothVars);
            inst.upper_constraint_fn = [r, inv_sqrt_r](const BilevelVector& v,
                                                       std::span<double> G) {
                for (int j = 0; j < r; ++j) {
                    G[j] = v.xu2[j] - inv_sqrt_r - std::log(v.xl2[j]);
                }
            };
            inst.lower_scopes = {ConstraintScope::BothVars};
            inst.lower_constraint_fn = [](const BilevelVector& v, std::span<double> g) {
                double res = 0.0;
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    res += sq(v.xu2[i] - std::log(v.xl2[i]));
                }
                g[0] = res - 1.0;
            };
            inst.psi_fn = [q, inv_sqrt_r](std::span<const double>,
                                          std::span<const double> xu2) {
                PsiReference psi;
                psi.xl1 = filled(q, 0.0);
                psi.xl2.resize(xu2.size());
                // Distribute the unit residual equally across components;
                // flip the sign where the preferred log target leaves the box.
                for (std::size_t i = 0; i < xu2.size(); ++i) {
                    double target = xu2[i] - inv_sqrt_r;
                    if (target < -1.0) target = xu2[i] + inv_sqrt_r;
                    psi.xl2[i] = std::exp(std::min(target, 1.0));
                }
                psi.is_unique = false;
                std::vector<double> xu2_copy(xu2.begin(), xu2.end());
                psi.set_residual = [xu2_copy](std::span<const double> xl1,
                                              std::span<const double> xl2) {
                    double h = sum_sq(xl1);
                    double res = 0.0;
                    for (std::size_t i = 0; i < xl2.size(); ++i) {
                        res += sq(xu2_copy[i] - std::log(xl2[i]));
                    }
                    return h + std::abs(res - 1.0);
                };
                return psi;
            };
            inst.optimum = OptimumRecord{
                BilevelVector{filled(p, 0.0), filled(r, 0.0), filled(q, 0.0),
                              filled(r, std::exp(-inv_sqrt_r))},
                -1.0, 1.0};
            break;
        }

        case ProblemId::SMD12: {
            inst.upper_bounds = block_bounds(p, kWideBox, r, Interval{-14.10, 14.10});
            inst.lower_bounds =
                block_bounds(q, kWideBox, r, Interval{-1.5, 1.5, true, true});
            inst.properties.conflicting = true;
            inst.properties.constrained = true;
            inst.properties.multi_global_lower = true;
            inst.upper_objective = [](const BilevelVector& v) {
                double F3 = sum_sq_shift(v.xu2, 2.0);
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    F3 += std::tan(std::abs(v.xl2[i]));
                    F3 -= sq(v.xu2[i] - std::tan(v.xl2[i]));
                }
                return sum_sq_shift(v.xu1, 2.0) + sum_sq(v.xl1) + F3;
            };
            inst.lower_objective = [](const BilevelVector& v) {
                double f3 = 0.0;
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    f3 += sq(v.xu2[i] - std::tan(v.xl2[i]));
                }
                return sum_sq(v.xu1) + sum_sq_shift(v.xl1, 2.0) + f3;
            };
            const double inv_sqrt_r = 1.0 / std::sqrt(static_cast<double>(r));
            inst.upper_scopes.assign(static_cast<std::size_t>(r), ConstraintScope::BothVars);
            inst.upper_scopes.insert(inst.upper_scopes.end(),
                                     static_cast<std::size_t>(p + r),
                                     ConstraintScope::UpperVars);
            inst.upper_constraint_fn = [p, r](const BilevelVector& v, std::span<double> G) {
                for (int j = 0; j < r; ++j) {
                    G[j] = v.xu2[j] - std::tan(v.xl2[j]);
                }
                const double cu1 = sum_cubes(v.xu1);
                const double cu2 = sum_cubes(v.xu2);
                for (int j = 0; j < p; ++j) {
                    G[r + j] = cubic_constraint(v.xu1, static_cast<std::size_t>(j), cu2);
                }
                for (int j = 0; j < r; ++j) {
                    G[r + p + j] = cubic_constraint(v.xu2, static_cast<std::size_t>(j), cu1);
                }
            };
            inst.lower_scopes = {ConstraintScope::BothVars};
            inst.lower_scopes.insert(inst.lower_scopes.end(), static_cast<std::size_t>(q),
                                     ConstraintScope::LowerVars);
            inst.lower_constraint_fn = [q](const BilevelVector& v, std::span<double> g) {
                double res = 0.0;
                for (std::size_t i = 0; i < v.xu2.size(); ++i) {
                    res += sq(v.xu2[i] - std::tan(v.xl2[i]));
                }
                g[0] = res - 1.0;
                for (int j = 0; j < q; ++j) {
                    g[1 + j] = cubic_constraint(v.xl1, static_cast<std::size_t>(j), 0.0);
                }
            };
            const double cl = 1.0 / std::sqrt(static_cast<double>(q - 1));
            const Interval xl2_box = inst.lower_bounds[static_cast<std::size_t>(q)];
            inst.psi_fn = [q, cl, inv_sqrt_r, xl2_box](std::span<const double>,
                                                       std::span<const double> xu2) {
                PsiReference psi;
                psi.xl1 = filled(q, cl);
                psi.xl2.resize(xu2.size());
                for (std::size_t i = 0; i < xu2.size(); ++i) {
                    double cand = std::atan(xu2[i] - inv_sqrt_r);
                    if (!xl2_box.contains(cand)) cand = std::atan(xu2[i] + inv_sqrt_r);
                    psi.xl2[i] = xl2_box.clamp(cand);
                }
                psi.is_unique = false;
                std::vector<double> xu2_copy(xu2.begin(), xu2.end());
                psi.set_residual = [cl, xu2_copy](std::span<const double> xl1,
                                                  std::span<const double> xl2) {
                    double h = 0.0;
                    for (double x : xl1) h += sq(x - cl);
                    double res = 0.0;
                    for (std::size_t i = 0; i < xl2.size(); ++i) {
                        res += sq(xu2_copy[i] - std::tan(xl2[i]));
                    }
                    return h + std::abs(res - 1.0);
                };
                return psi;
            };
            const double cu = 1.0 / std::sqrt(static_cast<double>(p + r - 1));
            std::vector<double> xl2_star(static_cast<std::size_t>(r),
                                         std::atan(cu - inv_sqrt_r));
            inst.optimum = OptimumRecord{
                BilevelVector{filled(p, cu), filled(r, cu), filled(q, cl), xl2_star},
                p * sq(cu - 2.0) + q * sq(cl) + r * sq(cu - 2.0) +
                    r * std::abs(cu - inv_sqrt_r) - 1.0,
                p * sq(cu) + q * sq(cl - 2.0) + 1.0};
            break;
        }
    }

    return inst;
}

Dims preset_dims(ProblemId id, int total_dimension) {
    const bool smd6 = (id == ProblemId::SMD6);
    switch (total_dimension) {
        case 5:
            return smd6 ? Dims{1, 0, 1, 2} : Dims{1, 2, 1, 0};
        case 10:
            return smd6 ? Dims{3, 1, 2, 2} : Dims{3, 3, 2, 0};
        case 20:
            return smd6 ? Dims{6, 2, 4, 4} : Dims{6, 6, 4, 0};
        default:
            throw std::invalid_argument("preset_dims: total dimension must be 5, 10 or 20, got " +
                                        std::to_string(total_dimension));
    }
}

namespace {

struct ResolvedAxis {
    bool upper;            // which level the variable lives on
    std::size_t flat_idx;  // index within the level's flat layout
};

ResolvedAxis resolve_axis(const ProblemInstance& inst, AxisRef axis) {
    const Dims& d = inst.dims;
    int block_len = 0;
    bool upper = true;
    std::size_t base = 0;
    switch (axis.block) {
        case AxisRef::Block::Xu1: block_len = d.p; upper = true; base = 0; break;
        case AxisRef::Block::Xu2: block_len = d.r; upper = true; base = static_cast<std::size_t>(d.p); break;
        case AxisRef::Block::Xl1: block_len = d.q + d.s; upper = false; base = 0; break;
        case AxisRef::Block::Xl2: block_len = d.r; upper = false; base = static_cast<std::size_t>(d.q + d.s); break;
    }
    if (axis.index < 0 || axis.index >= block_len) {
        throw std::invalid_argument(inst.name + ": axis " + to_string(axis) +
                                    " is out of range for this instance");
    }
    return {upper, base + static_cast<std::size_t>(axis.index)};
}

double& axis_slot(BilevelVector& v, const ProblemInstance& inst, const ResolvedAxis& ax) {
    const Dims& d = inst.dims;
    if (ax.upper) {
        return ax.flat_idx < static_cast<std::size_t>(d.p)
                   ? v.xu1[ax.flat_idx]
                   : v.xu2[ax.flat_idx - static_cast<std::size_t>(d.p)];
    }
    return ax.flat_idx < static_cast<std::size_t>(d.q + d.s)
               ? v.xl1[ax.flat_idx]
               : v.xl2[ax.flat_idx - static_cast<std::size_t>(d.q + d.s)];
}

}  // namespace

std::optional<AxisRef> parse_axis(std::string_view text) {
    AxisRef axis;
    std::string_view name = text;
    if (auto lb = text.find('['); lb != std::string_view::npos) {
        if (text.back() != ']') return std::nullopt;
        name = text.substr(0, lb);
        const std::string idx_str(text.substr(lb + 1, text.size() - lb - 2));
        try {
            axis.index = std::stoi(idx_str) - 1;
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    if (name == "xu1") axis.block = AxisRef::Block::Xu1;
    else if (name == "xu2") axis.block = AxisRef::Block::Xu2;
    else if (name == "xl1") axis.block = AxisRef::Block::Xl1;
    else if (name == "xl2") axis.block = AxisRef::Block::Xl2;
    else return std::nullopt;
    return axis;
}

std::string to_string(const AxisRef& axis) {
    const char* names[] = {"xu1", "xu2", "xl1", "xl2"};
    std::string out = names[static_cast<int>(axis.block)];
    out += "[" + std::to_string(axis.index + 1) + "]";
    return out;
}

ContourGrid contour_grid(const ProblemInstance& inst, const BilevelVector& base,
                         AxisRef axis1, AxisRef axis2, int resolution, bool follow_psi) {
    if (resolution < 2) {
        throw std::invalid_argument(inst.name + ": grid resolution must be >= 2, got " +
                                    std::to_string(resolution));
    }
    const ResolvedAxis ra1 = resolve_axis(inst, axis1);
    const ResolvedAxis ra2 = resolve_axis(inst, axis2);
    if (ra1.upper == ra2.upper && ra1.flat_idx == ra2.flat_idx) {
        throw std::invalid_argument(inst.name + ": the two grid axes must be distinct");
    }
    if (follow_psi && (!ra1.upper || !ra2.upper)) {
        throw std::invalid_argument(inst.name +
                                    ": follow_psi requires both axes at the upper level");
    }

    const Interval& iv1 = (ra1.upper ? inst.upper_bounds : inst.lower_bounds)[ra1.flat_idx];
    const Interval& iv2 = (ra2.upper ? inst.upper_bounds : inst.lower_bounds)[ra2.flat_idx];

    ContourGrid grid;
    grid.axis1 = axis1;
    grid.axis2 = axis2;
    grid.resolution = resolution;
    grid.samples.reserve(static_cast<std::size_t>(resolution) *
                         static_cast<std::size_t>(resolution));

    const auto line = [resolution](const Interval& iv, int k) {
        const double t = static_cast<double>(k) / (resolution - 1);
        return iv.inner_lo() + t * (iv.inner_hi() - iv.inner_lo());
    };

    BilevelVector point = base;
    for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
            point = base;
            axis_slot(point, inst, ra1) = line(iv1, i);
            axis_slot(point, inst, ra2) = line(iv2, j);
            GridSample sample;
            sample.a1 = line(iv1, i);
            sample.a2 = line(iv2, j);
            try {
                if (follow_psi) {
                    PsiReference psi = inst.psi_reference(point.xu1, point.xu2);
                    point.xl1 = psi.xl1;
                    point.xl2 = psi.xl2;
                }
                EvalOutcome out = inst.evaluate(point);
                sample.F = out.F;
                sample.f = out.f;
            } catch (const std::domain_error&) {
                sample.valid = false;
                sample.F = std::nan("");
                sample.f = std::nan("");
            }
            grid.samples.push_back(sample);
        }
    }
    return grid;
}

void write_grid_csv(std::ostream& os, const ContourGrid& grid) {
    os << "axis1,axis2,F,f\n";
    char buf[128];
    for (const GridSample& s : grid.samples) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", s.a1, s.a2, s.F, s.f);
        os << buf;
    }
}

std::string catalog_json(const std::vector<ProblemInstance>& instances) {
    nlohmann::json root = nlohmann::json::array();
    for (const ProblemInstance& inst : instances) {
        nlohmann::json entry;
        entry["name"] = inst.name;
        entry["dims"] = {{"p", inst.dims.p}, {"q", inst.dims.q},
                         {"r", inst.dims.r}, {"s", inst.dims.s}};
        entry["variables"] = {{"upper", inst.dims.upper()}, {"lower", inst.dims.lower()}};
        const auto bounds_json = [](const Bounds& b) {
            nlohmann::json arr = nlohmann::json::array();
            for (const Interval& iv : b.intervals()) {
                arr.push_back({{"lo", iv.lo}, {"hi", iv.hi},
                               {"open_lo", iv.open_lo}, {"open_hi", iv.open_hi}});
            }
            return arr;
        };
        entry["bounds"] = {{"upper", bounds_json(inst.upper_bounds)},
                           {"lower", bounds_json(inst.lower_bounds)}};
        const auto scopes_json = [](const std::vector<ConstraintScope>& scopes) {
            nlohmann::json arr = nlohmann::json::array();
            for (ConstraintScope sc : scopes) arr.push_back(to_string(sc));
            return arr;
        };
        entry["constraints"] = {{"upper", inst.upper_constraint_count()},
                                {"lower", inst.lower_constraint_count()},
                                {"upper_scopes", scopes_json(inst.upper_scopes)},
                                {"lower_scopes", scopes_json(inst.lower_scopes)}};
        entry["properties"] = {{"conflicting", inst.properties.conflicting},
                               {"cooperative", inst.properties.cooperative},
                               {"lower_multimodal", inst.properties.lower_multimodal},
                               {"upper_multimodal", inst.properties.upper_multimodal},
                               {"multi_global_lower", inst.properties.multi_global_lower},
                               {"constrained", inst.properties.constrained}};
        root.push_back(std::move(entry));
    }
    return root.dump(2);
}

}  // namespace smd
