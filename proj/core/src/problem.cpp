#include "smdbench/problem.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace smd {

namespace {
constexpr const char* kNames[kProblemCount] = {
    "SMD1", "SMD2", "SMD3", "SMD4", "SMD5", "SMD6",
    "SMD7", "SMD8", "SMD9", "SMD10", "SMD11", "SMD12",
};
}  // namespace

const char* to_string(ProblemId id) noexcept {
    return kNames[static_cast<int>(id)];
}

std::optional<ProblemId> parse_problem_id(std::string_view name) noexcept {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (int i = 0; i < kProblemCount; ++i) {
        if (upper == kNames[i]) return static_cast<ProblemId>(i);
    }
    return std::nullopt;
}

const std::vector<ProblemId>& all_problem_ids() {
    static const std::vector<ProblemId> ids = [] {
        std::vector<ProblemId> v;
        for (int i = 0; i < kProblemCount; ++i) v.push_back(static_cast<ProblemId>(i));
        return v;
    }();
    return ids;
}

void ProblemInstance::require_in_domain(const BilevelVector& v) const {
    if (!v.matches(dims)) {
        throw std::domain_error(name + ": vector blocks do not match dims (p=" +
                                std::to_string(dims.p) + ", q=" + std::to_string(dims.q) +
                                ", r=" + std::to_string(dims.r) + ", s=" + std::to_string(dims.s) + ")");
    }
    const auto check_block = [&](std::span<const double> block, const Bounds& b,
                                 std::size_t offset, const char* level) {
        for (std::size_t i = 0; i < block.size(); ++i) {
            if (!b[offset + i].contains(block[i])) {
                throw std::domain_error(name + ": " + level + " variable " +
                                        std::to_string(offset + i) + " = " +
                                        std::to_string(block[i]) + " outside its range");
            }
        }
    };
    check_block(v.xu1, upper_bounds, 0, "upper");
    check_block(v.xu2, upper_bounds, v.xu1.size(), "upper");
    check_block(v.xl1, lower_bounds, 0, "lower");
    check_block(v.xl2, lower_bounds, v.xl1.size(), "lower");
}

EvalOutcome ProblemInstance::evaluate(const BilevelVector& v) const {
    require_in_domain(v);
    EvalOutcome out;
    out.F = upper_objective(v);
    out.f = lower_objective(v);
    out.G.resize(upper_scopes.size());
    out.g.resize(lower_scopes.size());
    if (!out.G.empty()) upper_constraint_fn(v, out.G);
    if (!out.g.empty()) lower_constraint_fn(v, out.g);
    out.G_scope = upper_scopes;
    out.g_scope = lower_scopes;
    return out;
}

double ProblemInstance::upper_value(const BilevelVector& v, std::span<double> G_out) const {
    require_in_domain(v);
    if (G_out.size() != upper_scopes.size()) {
        detail::throw_length_mismatch(name + ": upper constraint buffer", G_out.size(),
                                      upper_scopes.size());
    }
    if (!G_out.empty()) upper_constraint_fn(v, G_out);
    return upper_objective(v);
}

double ProblemInstance::lower_value(const BilevelVector& v, std::span<double> g_out) const {
    require_in_domain(v);
    if (g_out.size() != lower_scopes.size()) {
        detail::throw_length_mismatch(name + ": lower constraint buffer", g_out.size(),
                                      lower_scopes.size());
    }
    if (!g_out.empty()) lower_constraint_fn(v, g_out);
    return lower_objective(v);
}

PsiReference ProblemInstance::psi_reference(std::span<const double> xu1,
                                            std::span<const double> xu2) const {
    if (!psi_fn) {
        throw std::logic_error(name + ": instance has no analytic Ψ oracle");
    }
    if (xu1.size() != static_cast<std::size_t>(dims.p)) {
        detail::throw_length_mismatch(name + ": xu1", xu1.size(),
                                      static_cast<std::size_t>(dims.p));
    }
    if (xu2.size() != static_cast<std::size_t>(dims.r)) {
        detail::throw_length_mismatch(name + ": xu2", xu2.size(),
                                      static_cast<std::size_t>(dims.r));
    }
    return psi_fn(xu1, xu2);
}

PsiReference ProblemInstance::psi_reference(std::span<const double> xu_flat) const {
    if (xu_flat.size() != static_cast<std::size_t>(dims.upper())) {
        detail::throw_length_mismatch(name + ": xu", xu_flat.size(),
                                      static_cast<std::size_t>(dims.upper()));
    }
    return psi_reference(xu_flat.subspan(0, dims.p), xu_flat.subspan(dims.p));
}

const OptimumRecord& ProblemInstance::known_optimum() const {
    if (!optimum) {
        throw std::logic_error(name + ": instance has no recorded optimum");
    }
    return *optimum;
}

}  // namespace smd
