#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cfb/core.hpp"
#include "cfb/estimation.hpp"

// Hierarchical generative process for assessing the bounds, the randomized
// benchmark behind the identification-error table, and sensitivity sweeps.

namespace cfb {

struct SimulationParams {
    std::size_t n = 1000;                   // evaluation-set size
    int v = 20;                             // binomial variance knob (higher = less noise)
    std::array<double, 4> dirichlet = {1, 1, 1, 1};
    std::uint64_t seed = 0;

    void validate() const;
};

struct Individual {
    CounterfactualDist dist;   // true per-individual distribution
    double s0 = 0.0, s1 = 0.0;           // exact scores (s0 = beta+delta, s1 = gamma+delta)
    double s0_hat = 0.0, s1_hat = 0.0;   // noisy scores, multiples of 1/v
    int y0 = 0, y1 = 0;                  // realized potential outcomes
};

struct SimulatedPopulation {
    std::vector<Individual> individuals;
    CounterfactualDist truth;  // componentwise means

    ScoreSet exact_scores() const;
    ScoreSet noisy_scores() const;
    std::vector<CounterfactualDist> dists() const;
};

// Per individual: Dirichlet draw, exact scores, normalized-binomial noisy
// scores, categorical outcome pair. Deterministic given the seed.
SimulatedPopulation sample_population(const SimulationParams& params);

struct BenchmarkProtocol {
    std::size_t runs = 5000;
    std::size_t n_min = 10, n_max = 10000;
    int v_min = 5, v_max = 50;
    double a_min = 0.1, a_max = 15.0;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct RunRecord {
    std::size_t n = 0;
    int v = 0;
    double concentration = 0.0;                   // A
    std::array<double, 4> truth{};                // population means
    std::array<double, 4> point{};
    std::array<double, 4> uplift_lower{}, uplift_upper{};
    std::array<double, 4> frechet_lower{}, frechet_upper{};
    double phi_expected = 0.0;                    // (ad-bc)/(A(A+1)) for the run's weights
};

struct Stratum {
    double lo = 0.0, hi = 0.0;
    std::size_t count = 0;
    double mean_truth = 0.0, mean_point = 0.0;
    double mean_uplift_lower = 0.0, mean_uplift_upper = 0.0;
    double mean_frechet_lower = 0.0, mean_frechet_upper = 0.0;
};

struct BenchmarkReport {
    std::vector<RunRecord> runs;
    // Aggregates for beta (widths are identical across quantities).
    double mean_uplift_width = 0.0;
    double mean_frechet_width = 0.0;
    double rmse_point = 0.0;
    double rmse_uplift_midpoint = 0.0;
    double rmse_frechet_midpoint = 0.0;
    std::vector<Stratum> alpha_strata;  // stratified over true alpha
};

// Randomized-parameter benchmark. Per-run seeds are derived from the master
// seed and results are merged in run order, so the report is identical for
// any thread count.
BenchmarkReport run_benchmark(const BenchmarkProtocol& protocol);

enum class SweepAxis { A, N, V };

struct SweepRecord {
    double axis_value = 0.0;
    double mean_entropy = 0.0;
    double mean_span = 0.0;
    double mean_abs_error = 0.0;  // |beta_hat - beta| from noisy scores
    std::vector<double> entropy, span, abs_error;  // per replicate
};

// One averaged record per grid value, varying one axis of `fixed`.
std::vector<SweepRecord> sensitivity_sweep(SweepAxis axis, const std::vector<double>& grid,
                                           const SimulationParams& fixed,
                                           std::size_t replicates);

}  // namespace cfb
