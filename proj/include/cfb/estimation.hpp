#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>

#include "cfb/core.hpp"
#include "cfb/ingest.hpp"

// Conditional-independence point estimators and their bias diagnostics.

namespace cfb {

struct PointEstimate {
    CounterfactualDist dist;
    std::size_t n_samples = 0;
};

// Decomposition of the point estimator's intrinsic bias. The model covariance
// term requires resampling the training process and is therefore optional;
// when absent, bias_beta reduces to phi_mean.
struct BiasReport {
    double phi_mean = 0.0;        // alpha*delta - beta*gamma - cov(S0, S1)
    double cov_scores = 0.0;      // population covariance of (s0, s1) over individuals
    std::optional<double> model_cov_term;
    double bias_beta = 0.0;       // phi_mean - model_cov_term (if present)
};

struct EstimationReport {
    PointEstimate point;
    std::array<Interval, 4> uplift_intervals;   // indexed by Quantity order
    std::array<Interval, 4> frechet_intervals;
    ScorePair score_means;
};

// Empirical means of the independence products, e.g.
// beta_hat = mean of s0*(1-s1). Components sum to 1 by construction.
PointEstimate point_estimates(const ScoreSet& scores);

// Midpoints of the uplift intervals, the naive baseline estimator.
CounterfactualDist midpoint_estimates(const ScoreSet& scores);

// Population phi = alpha*delta - beta*gamma - cov(s0, s1), where the Greek
// letters are component means over the collection and the covariance is the
// population-formula covariance of the implied scores. Equals the mean of the
// per-individual alpha*delta - beta*gamma.
double phi_population(std::span<const CounterfactualDist> dists);

BiasReport bias_report(std::span<const CounterfactualDist> dists,
                       std::optional<double> model_cov_term = std::nullopt);

// E[phi] = (ad - bc) / (A (A + 1)) with A = a+b+c+d, for individual
// distributions drawn from Dirichlet(a, b, c, d).
double theoretical_bias(double a, double b, double c, double d);

// Point estimates plus uplift and Fréchet intervals for all four quantities.
EstimationReport make_report(const ScoreSet& scores);

struct SplitSpec {
    enum class Mode { SingleSplit, KFold };
    Mode mode = Mode::KFold;
    int k_folds = 5;              // KFold mode
    double test_fraction = 0.3;   // SingleSplit mode
    std::uint64_t seed = 0;
};

// Trains the learner, scores held-out rows, and reports point estimates with
// both bound families. In KFold mode every row is scored out of fold; in
// SingleSplit mode only the test portion is scored.
EstimationReport run_algorithm_one(const CampaignDataset& dataset,
                                   const ScoreModelSpec& learner,
                                   const SplitSpec& split,
                                   ScoreSet* out_scores = nullptr);

}  // namespace cfb
