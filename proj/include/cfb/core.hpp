#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

// Counterfactual probability types and the two bound families.
//
// Sign convention: the uplift is U = S0 - S1 (control minus treated), i.e. a
// positive uplift means the treatment reduces the probability of the outcome.
// The opposite convention exists in the literature; everything in this
// library follows U = S0 - S1.

namespace cfb {

enum class Quantity { Alpha, Beta, Gamma, Delta };

inline constexpr std::array<Quantity, 4> kAllQuantities = {
    Quantity::Alpha, Quantity::Beta, Quantity::Gamma, Quantity::Delta};

const char* to_string(Quantity q);

// Joint distribution of the two potential outcomes for one individual (or a
// population aggregate):
//   alpha = P(Y0=0, Y1=0)   sure thing
//   beta  = P(Y0=1, Y1=0)   persuadable
//   gamma = P(Y0=0, Y1=1)   do-not-disturb
//   delta = P(Y0=1, Y1=1)   lost cause
// Components must be in [0,1] and sum to 1 within 1e-9.
struct CounterfactualDist {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double delta = 0.0;

    // Validating constructor; throws std::domain_error on simplex violations.
    static CounterfactualDist make(double alpha, double beta, double gamma, double delta);

    double operator[](Quantity q) const;

    // -sum p*ln(p) in nats, with 0*ln(0) = 0. Range [0, ln 4].
    double entropy() const;
};

// Per-individual outcome probabilities under control (s0) and treatment (s1).
struct ScorePair {
    double s0 = 0.0;
    double s1 = 0.0;
};

using ScoreSet = std::vector<ScorePair>;

// Identities s0 = beta + delta, s1 = gamma + delta.
ScorePair scores_from(const CounterfactualDist& d);

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
    Quantity quantity = Quantity::Alpha;

    double width() const { return upper - lower; }
    double midpoint() const { return 0.5 * (lower + upper); }
    bool contains(double x) const { return lower <= x && x <= upper; }
};

// Validates a probability: values within 1e-9 of [0,1] are snapped to the
// boundary, anything further out is rejected.
double checked_probability(double p, const char* what);

// Fréchet bounds on quantity q from the marginal outcome probabilities
// s0_mean = P(Y0=1), s1_mean = P(Y1=1).
Interval frechet_bounds(double s0_mean, double s1_mean, Quantity q);

// Width of the Fréchet interval: min{s0, s1, 1-s0, 1-s1}, identical for all
// four quantities.
double frechet_span(double s0_mean, double s1_mean);

// Uplift bounds: empirical means of the pointwise Fréchet expressions over
// the score set. Always contained in the Fréchet interval computed from the
// score means (Jensen's inequality).
Interval uplift_bounds(const ScoreSet& scores, Quantity q);

// E[min{s0, s1, 1-s0, 1-s1}]; equals uplift_bounds(q).width() for every q.
double uplift_bounds_span(const ScoreSet& scores);

// Componentwise means of a score set; throws on an empty set.
ScorePair mean_scores(const ScoreSet& scores);

// Mean per-individual entropy of a collection of distributions, in nats.
double conditional_entropy(std::span<const CounterfactualDist> dists);

}  // namespace cfb
