#include "cfb/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cfb {

namespace {

constexpr double kSnapTol = 1e-9;
constexpr double kSimplexTol = 1e-9;

double plogp(double p) {
    return p > 0.0 ? p * std::log(p) : 0.0;
}

void require_nonempty(const ScoreSet& scores) {
    if (scores.empty()) {
        throw std::invalid_argument("score set is empty: expectation undefined");
    }
}

}  // namespace

const char* to_string(Quantity q) {
    switch (q) {
        case Quantity::Alpha: return "alpha";
        case Quantity::Beta: return "beta";
        case Quantity::Gamma: return "gamma";
        case Quantity::Delta: return "delta";
    }
    return "?";
}

double checked_probability(double p, const char* what) {
    if (!(p >= -kSnapTol && p <= 1.0 + kSnapTol)) {
        throw std::domain_error(std::string(what) + " = " + std::to_string(p) +
                                " is not a probability");
    }
    return std::clamp(p, 0.0, 1.0);
}

CounterfactualDist CounterfactualDist::make(double alpha, double beta, double gamma,
                                            double delta) {
    CounterfactualDist d;
    d.alpha = checked_probability(alpha, "alpha");
    d.beta = checked_probability(beta, "beta");
    d.gamma = checked_probability(gamma, "gamma");
    d.delta = checked_probability(delta, "delta");
    const double sum = d.alpha + d.beta + d.gamma + d.delta;
    if (std::abs(sum - 1.0) > kSimplexTol) {
        throw std::domain_error("counterfactual distribution sums to " +
                                std::to_string(sum) + ", expected 1");
    }
    return d;
}

double CounterfactualDist::operator[](Quantity q) const {
    switch (q) {
        case Quantity::Alpha: return alpha;
        case Quantity::Beta: return beta;
        case Quantity::Gamma: return gamma;
        case Quantity::Delta: return delta;
    }
    return 0.0;
}

double CounterfactualDist::entropy() const {
    return -(plogp(alpha) + plogp(beta) + plogp(gamma) + plogp(delta));
}

ScorePair scores_from(const CounterfactualDist& d) {
    return {d.beta + d.delta, d.gamma + d.delta};
}

namespace {

// Pointwise Fréchet expressions for one (s0, s1) pair. The population-level
// Fréchet bounds and the per-individual terms inside the uplift bounds are
// the same formulas evaluated at different arguments.
double pointwise_lower(double s0, double s1, Quantity q) {
    switch (q) {
        case Quantity::Alpha: return std::max(0.0, 1.0 - s0 - s1);
        case Quantity::Beta: return std::max(0.0, s0 - s1);
        case Quantity::Gamma: return std::max(0.0, s1 - s0);
        case Quantity::Delta: return std::max(0.0, s0 + s1 - 1.0);
    }
    return 0.0;
}

double pointwise_upper(double s0, double s1, Quantity q) {
    switch (q) {
        case Quantity::Alpha: return std::min(1.0 - s0, 1.0 - s1);
        case Quantity::Beta: return std::min(s0, 1.0 - s1);
        case Quantity::Gamma: return std::min(1.0 - s0, s1);
        case Quantity::Delta: return std::min(s0, s1);
    }
    return 0.0;
}

}  // namespace

Interval frechet_bounds(double s0_mean, double s1_mean, Quantity q) {
    const double s0 = checked_probability(s0_mean, "s0");
    const double s1 = checked_probability(s1_mean, "s1");
    return {pointwise_lower(s0, s1, q), pointwise_upper(s0, s1, q), q};
}

double frechet_span(double s0_mean, double s1_mean) {
    const double s0 = checked_probability(s0_mean, "s0");
    const double s1 = checked_probability(s1_mean, "s1");
    return std::min({s0, s1, 1.0 - s0, 1.0 - s1});
}

Interval uplift_bounds(const ScoreSet& scores, Quantity q) {
    require_nonempty(scores);
    double lo = 0.0;
    double hi = 0.0;
    for (const ScorePair& p : scores) {
        const double s0 = checked_probability(p.s0, "s0");
        const double s1 = checked_probability(p.s1, "s1");
        lo += pointwise_lower(s0, s1, q);
        hi += pointwise_upper(s0, s1, q);
    }
    const double n = static_cast<double>(scores.size());
    return {lo / n, hi / n, q};
}

double uplift_bounds_span(const ScoreSet& scores) {
    require_nonempty(scores);
    double acc = 0.0;
    for (const ScorePair& p : scores) {
        const double s0 = checked_probability(p.s0, "s0");
        const double s1 = checked_probability(p.s1, "s1");
        acc += std::min({s0, s1, 1.0 - s0, 1.0 - s1});
    }
    return acc / static_cast<double>(scores.size());
}

ScorePair mean_scores(const ScoreSet& scores) {
    require_nonempty(scores);
    double m0 = 0.0;
    double m1 = 0.0;
    for (const ScorePair& p : scores) {
        m0 += p.s0;
        m1 += p.s1;
    }
    const double n = static_cast<double>(scores.size());
    return {m0 / n, m1 / n};
}

double conditional_entropy(std::span<const CounterfactualDist> dists) {
    if (dists.empty()) {
        throw std::invalid_argument("entropy of an empty collection is undefined");
    }
    double acc = 0.0;
    for (const CounterfactualDist& d : dists) acc += d.entropy();
    return acc / static_cast<double>(dists.size());
}

}  // namespace cfb
