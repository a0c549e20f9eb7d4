#include "smdbench/construction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smd {

namespace {

void check_arity(const ComponentFunction& c, BlockSet allowed, const char* role) {
    if (!c.fn) {
        throw std::invalid_argument(std::string("compose: component ") + role + " (" +
                                    c.label + ") has no evaluation rule");
    }
    if (!reads_only(c.reads, allowed)) {
        throw std::invalid_argument(std::string("compose: component ") + role + " (" +
                                    c.label + ") reads blocks outside its role");
    }
}

double sq(double x) { return x * x; }

}  // namespace

const char* to_string(InteractionMode mode) noexcept {
    switch (mode) {
        case InteractionMode::Cooperative: return "cooperative";
        case InteractionMode::Conflicting: return "conflicting";
        case InteractionMode::MixedA: return "mixed-a";
        case InteractionMode::MixedB: return "mixed-b";
    }
    return "?";
}

ProblemInstance compose(const ComponentFunction& F1, const ComponentFunction& F2,
                        const ComponentFunction& F3, const ComponentFunction& f1,
                        const ComponentFunction& f2, const ComponentFunction& f3,
                        const Bounds& upper_bounds, const Bounds& lower_bounds,
                        const Dims& dims, std::string name) {
    dims.validate();
    check_arity(F1, BlockSet::Xu1, "F1");
    check_arity(F2, BlockSet::Xl1, "F2");
    check_arity(F3, BlockSet::Xu2 | BlockSet::Xl2, "F3");
    check_arity(f1, BlockSet::Xu1 | BlockSet::Xu2, "f1");
    check_arity(f2, BlockSet::Xl1, "f2");
    check_arity(f3, BlockSet::Xu2 | BlockSet::Xl2, "f3");
    if (upper_bounds.size() != static_cast<std::size_t>(dims.upper())) {
        detail::throw_length_mismatch("compose: upper bounds", upper_bounds.size(),
                                      static_cast<std::size_t>(dims.upper()));
    }
    if (lower_bounds.size() != static_cast<std::size_t>(dims.lower())) {
        detail::throw_length_mismatch("compose: lower bounds", lower_bounds.size(),
                                      static_cast<std::size_t>(dims.lower()));
    }

    ProblemInstance inst;
    inst.name = std::move(name);
    inst.dims = dims;
    inst.upper_bounds = upper_bounds;
    inst.lower_bounds = lower_bounds;
    inst.upper_objective = [F1, F2, F3](const BilevelVector& v) {
        return F1.fn(v) + F2.fn(v) + F3.fn(v);
    };
    inst.lower_objective = [f1, f2, f3](const BilevelVector& v) {
        return f1.fn(v) + f2.fn(v) + f3.fn(v);
    };
    return inst;
}

std::pair<ComponentFunction, ComponentFunction> apply_interaction(
    const ComponentFunction& f2, const ComponentFunction& f3,
    const ComponentFunction& F4, InteractionMode mode) {
    check_arity(f2, BlockSet::Xl1, "f2");
    check_arity(f3, BlockSet::Xu2 | BlockSet::Xl2, "f3");
    check_arity(F4, BlockSet::Xu2, "F4");

    const bool negate_f2 =
        (mode == InteractionMode::Conflicting || mode == InteractionMode::MixedB);
    const bool negate_f3 =
        (mode == InteractionMode::Conflicting || mode == InteractionMode::MixedA);

    ComponentFunction F2_out;
    F2_out.label = std::string(negate_f2 ? "-" : "") + f2.label;
    F2_out.reads = f2.reads;
    F2_out.fn = [inner = f2.fn, negate_f2](const BilevelVector& v) {
        const double value = inner(v);
        return negate_f2 ? -value : value;
    };

    ComponentFunction F3_out;
    F3_out.label = F4.label + (negate_f3 ? " - " : " + ") + f3.label;
    F3_out.reads = F4.reads | f3.reads;
    F3_out.fn = [base = F4.fn, inner = f3.fn, negate_f3](const BilevelVector& v) {
        const double value = inner(v);
        return base(v) + (negate_f3 ? -value : value);
    };
    return {std::move(F2_out), std::move(F3_out)};
}

ComponentFunction multi_global_lower(const ComponentFunction& base) {
    if (!reads_only(base.reads, BlockSet::Xl1) || !reads_block(base.reads, BlockSet::Xl1)) {
        throw std::invalid_argument("multi_global_lower: base component must read xl1 only");
    }
    ComponentFunction out;
    out.label = "diagonal-valley(" + base.label + ")";
    out.reads = BlockSet::Xl1;
    out.known_min = 0.0;
    out.fn = [](const BilevelVector& v) {
        if (v.xl1.size() < 2) {
            throw std::invalid_argument(
                "multi_global_lower: needs at least 2 xl1 components");
        }
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < v.xl1.size(); ++i) {
            s += sq(v.xl1[i] - v.xl1[i + 1]);
        }
        return s;
    };
    return out;
}

void StackelbergParams::validate() const {
    const auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) {
            throw std::invalid_argument(std::string("StackelbergParams: ") + name +
                                        " must be positive");
        }
    };
    positive(alpha, "alpha");
    positive(beta, "beta");
    positive(delta_l, "delta_l");
    positive(delta_f, "delta_f");
    positive(gamma_l, "gamma_l");
    positive(gamma_f, "gamma_f");
    if (c_l < 0.0 || c_f < 0.0) {
        throw std::invalid_argument("StackelbergParams: fixed costs must be non-negative");
    }
}

StackelbergSolution stackelberg_optimum(const StackelbergParams& p) {
    p.validate();
    const double denom = 4.0 * (p.beta + p.delta_f) * (p.beta + p.delta_l) - 2.0 * sq(p.beta);
    StackelbergSolution sol;
    sol.q_l = (2.0 * (p.beta + p.delta_f) * (p.alpha - p.gamma_l) -
               p.beta * (p.alpha - p.gamma_f)) /
              denom;
    sol.q_f = (p.alpha - p.gamma_f) / (2.0 * (p.beta + p.delta_f)) -
              (p.beta * (p.alpha - p.gamma_l) -
               sq(p.beta) * (p.alpha - p.gamma_f) / (2.0 * (p.beta + p.delta_f))) /
                  denom;
    sol.Q = sol.q_l + sol.q_f;
    const double price = p.alpha - p.beta * sol.Q;
    sol.profit_l = price * sol.q_l - (p.delta_l * sq(sol.q_l) + p.gamma_l * sol.q_l + p.c_l);
    sol.profit_f = price * sol.q_f - (p.delta_f * sq(sol.q_f) + p.gamma_f * sol.q_f + p.c_f);
    sol.nonpositive_warning = (sol.q_l <= 0.0 || sol.q_f <= 0.0);
    return sol;
}

ProblemInstance stackelberg_problem(const StackelbergParams& p) {
    p.validate();
    const double q_max = p.alpha / p.beta;  // price is non-negative on [0, alpha/beta]

    ProblemInstance inst;
    inst.name = "stackelberg";
    inst.dims = Dims{2, 1, 0, 0};  // upper (q_l, Q), lower q_f
    inst.upper_bounds = Bounds::uniform(2, Interval{0.0, q_max});
    inst.lower_bounds = Bounds::uniform(1, Interval{0.0, q_max});
    inst.properties.conflicting = true;
    inst.properties.constrained = true;

    // Leader profit uses the demand variable Q; follower profit uses the
    // market-clearing price P(q_l + q_f), which is what makes the printed
    // closed-form equilibrium the bilevel optimum. Both are negated into
    // minimisation form.
    inst.upper_objective = [p](const BilevelVector& v) {
        const double q_l = v.xu1[0];
        const double Q = v.xu1[1];
        const double price = p.alpha - p.beta * Q;
        return -(price * q_l - (p.delta_l * sq(q_l) + p.gamma_l * q_l + p.c_l));
    };
    inst.lower_objective = [p](const BilevelVector& v) {
        const double q_l = v.xu1[0];
        const double q_f = v.xl1[0];
        const double price = p.alpha - p.beta * (q_l + q_f);
        return -(price * q_f - (p.delta_f * sq(q_f) + p.gamma_f * q_f + p.c_f));
    };
    // Demand covers total production; the leader prefers small Q, so the
    // constraint is tight at the optimum and Q* = q_l* + q_f*.
    inst.upper_scopes = {ConstraintScope::BothVars};
    inst.upper_constraint_fn = [](const BilevelVector& v, std::span<double> G) {
        G[0] = v.xu1[1] - v.xu1[0] - v.xl1[0];
    };
    inst.psi_fn = [p, q_max](std::span<const double> xu1, std::span<const double>) {
        const double q_l = xu1[0];
        const double reaction =
            (p.alpha - p.gamma_f - p.beta * q_l) / (2.0 * (p.beta + p.delta_f));
        PsiReference psi;
        psi.xl1 = {std::min(std::max(reaction, 0.0), q_max)};
        psi.is_unique = true;
        return psi;
    };

    const StackelbergSolution star = stackelberg_optimum(p);
    inst.optimum = OptimumRecord{
        BilevelVector{{star.q_l, star.Q}, {}, {star.q_f}, {}},
        -star.profit_l, -star.profit_f};
    return inst;
}

}  // namespace smd
