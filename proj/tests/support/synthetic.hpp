#pragma once

// Synthetic campaign generator used as the oracle for end-to-end tests: the
// per-individual counterfactual distributions are known, features encode the
// true scores (two log-odds features make a linear model exactly
// sufficient), and outcomes are realized potential outcomes.

#include <array>
#include <cmath>
#include <cstdint>

#include "cfb/core.hpp"
#include "cfb/ingest.hpp"
#include "cfb/rng.hpp"

namespace cfb::testing {

struct SyntheticSpec {
    std::size_t rows = 11268;
    double control_fraction = 0.33;
    // population-level (alpha, beta, gamma, delta)
    std::array<double, 4> base = {0.924, 0.036, 0.028, 0.012};
    double concentration = 60.0;  // Dirichlet concentration around `base`
    std::uint64_t seed = 0;
};

struct SyntheticCampaign {
    CampaignDataset data;
    CounterfactualDist truth;  // means of the per-individual true distributions
    ScoreSet true_scores;
};

inline SyntheticCampaign make_synthetic_campaign(const SyntheticSpec& spec) {
    Rng rng(spec.seed);
    SyntheticCampaign out;
    out.data.feature_names = {"logit_s0", "logit_s1"};
    out.data.features.reserve(spec.rows);
    double ma = 0.0, mb = 0.0, mg = 0.0, md = 0.0;

    std::array<double, 4> weights;
    for (int i = 0; i < 4; ++i) weights[i] = spec.concentration * spec.base[i];

    auto logit = [](double p) {
        const double q = std::clamp(p, 1e-4, 1.0 - 1e-4);
        return std::log(q / (1.0 - q));
    };

    for (std::size_t r = 0; r < spec.rows; ++r) {
        const auto p = dirichlet4(rng, weights);
        const double s0 = p[1] + p[3];
        const double s1 = p[2] + p[3];
        out.true_scores.push_back({s0, s1});
        out.data.features.push_back({logit(s0), logit(s1)});
        out.data.ids.push_back(std::to_string(r));

        const int t = uniform01(rng) < spec.control_fraction ? 0 : 1;
        const int cell = categorical4(rng, p);
        const int y0 = (cell == 1 || cell == 3) ? 1 : 0;
        const int y1 = (cell == 2 || cell == 3) ? 1 : 0;
        out.data.treatment.push_back(t);
        out.data.outcome.push_back(t == 0 ? y0 : y1);

        ma += p[0];
        mb += p[1];
        mg += p[2];
        md += p[3];
    }
    const double n = static_cast<double>(spec.rows);
    out.truth = CounterfactualDist::make(ma / n, mb / n, mg / n, md / n);
    return out;
}

}  // namespace cfb::testing
