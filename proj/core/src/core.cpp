#include "smdbench/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smd {

void Dims::validate() const {
    if (p < 0 || q < 0 || r < 0 || s < 0) {
        throw std::invalid_argument("Dims: counts must be non-negative, got p=" +
                                    std::to_string(p) + " q=" + std::to_string(q) +
                                    " r=" + std::to_string(r) + " s=" + std::to_string(s));
    }
    if (upper() < 1) {
        throw std::invalid_argument("Dims: at least one upper-level variable required (p + r >= 1)");
    }
    if (lower() < 1) {
        throw std::invalid_argument("Dims: at least one lower-level variable required (q + s + r >= 1)");
    }
}

double Interval::clamp(double x) const noexcept {
    return std::min(std::max(x, inner_lo()), inner_hi());
}

bool Interval::contains(double x) const noexcept {
    if (open_lo ? x <= lo : x < lo) return false;
    if (open_hi ? x >= hi : x > hi) return false;
    return true;
}

Bounds::Bounds(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
    for (const Interval& iv : intervals_) {
        if (!(iv.lo < iv.hi)) {
            throw std::invalid_argument("Bounds: lower limit must be strictly below upper limit");
        }
    }
}

Bounds Bounds::uniform(std::size_t n, Interval iv) {
    return Bounds(std::vector<Interval>(n, iv));
}

Bounds Bounds::concat(const Bounds& a, const Bounds& b) {
    std::vector<Interval> ivs = a.intervals_;
    ivs.insert(ivs.end(), b.intervals_.begin(), b.intervals_.end());
    return Bounds(std::move(ivs));
}

bool Bounds::contains(std::span<const double> v) const {
    if (v.size() != intervals_.size()) {
        detail::throw_length_mismatch("Bounds::contains vector", v.size(), intervals_.size());
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!intervals_[i].contains(v[i])) return false;
    }
    return true;
}

void Bounds::clamp_in_place(std::span<double> v) const {
    if (v.size() != intervals_.size()) {
        detail::throw_length_mismatch("Bounds::clamp vector", v.size(), intervals_.size());
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = intervals_[i].clamp(v[i]);
    }
}

std::vector<double> Bounds::sample(std::mt19937_64& rng) const {
    std::vector<double> out(intervals_.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uniform_real_distribution<double> dist(intervals_[i].inner_lo(),
                                                    intervals_[i].inner_hi());
        out[i] = dist(rng);
    }
    return out;
}

std::vector<double> BilevelVector::upper_flat() const {
    std::vector<double> out = xu1;
    out.insert(out.end(), xu2.begin(), xu2.end());
    return out;
}

std::vector<double> BilevelVector::lower_flat() const {
    std::vector<double> out = xl1;
    out.insert(out.end(), xl2.begin(), xl2.end());
    return out;
}

bool BilevelVector::matches(const Dims& dims) const noexcept {
    return xu1.size() == static_cast<std::size_t>(dims.p) &&
           xu2.size() == static_cast<std::size_t>(dims.r) &&
           xl1.size() == static_cast<std::size_t>(dims.q + dims.s) &&
           xl2.size() == static_cast<std::size_t>(dims.r);
}

BilevelVector split(std::span<const double> upper_flat,
                    std::span<const double> lower_flat, const Dims& dims) {
    dims.validate();
    if (upper_flat.size() != static_cast<std::size_t>(dims.upper())) {
        detail::throw_length_mismatch("split: upper vector", upper_flat.size(),
                                      static_cast<std::size_t>(dims.upper()));
    }
    if (lower_flat.size() != static_cast<std::size_t>(dims.lower())) {
        detail::throw_length_mismatch("split: lower vector", lower_flat.size(),
                                      static_cast<std::size_t>(dims.lower()));
    }
    BilevelVector v;
    v.xu1.assign(upper_flat.begin(), upper_flat.begin() + dims.p);
    v.xu2.assign(upper_flat.begin() + dims.p, upper_flat.end());
    v.xl1.assign(lower_flat.begin(), lower_flat.begin() + dims.q + dims.s);
    v.xl2.assign(lower_flat.begin() + dims.q + dims.s, lower_flat.end());
    return v;
}

const char* to_string(ConstraintScope scope) noexcept {
    switch (scope) {
        case ConstraintScope::UpperVars: return "a";
        case ConstraintScope::LowerVars: return "b";
        case ConstraintScope::BothVars: return "c";
    }
    return "?";
}

double EvalOutcome::upper_violation() const { return total_violation(G); }
double EvalOutcome::lower_violation() const { return total_violation(g); }
bool EvalOutcome::feasible() const {
    return upper_violation() == 0.0 && lower_violation() == 0.0;
}

double total_violation(std::span<const double> constraints) {
    double sum = 0.0;
    for (double c : constraints) {
        if (c < 0.0) sum -= c;
    }
    return sum;
}

std::vector<double> clamp_to_bounds(std::span<const double> v, const Bounds& bounds) {
    if (v.size() != bounds.size()) {
        detail::throw_length_mismatch("clamp_to_bounds vector", v.size(), bounds.size());
    }
    std::vector<double> out(v.begin(), v.end());
    bounds.clamp_in_place(out);
    return out;
}

namespace detail {
void throw_length_mismatch(const std::string& what, std::size_t got, std::size_t want) {
    throw std::invalid_argument(what + " has length " + std::to_string(got) +
                                ", expected " + std::to_string(want));
}
}  // namespace detail

}  // namespace smd
