#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cfb/core.hpp"
#include "cfb/rng.hpp"

using namespace cfb;

namespace {

// Random score sets across regimes: uniform pairs, near-boundary values, and
// the small-score regime typical of churn data.
ScoreSet random_score_set(Rng& rng, std::size_t max_size = 50) {
    const std::size_t n = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<std::int64_t>(max_size)));
    const int regime = static_cast<int>(uniform_int(rng, 0, 2));
    ScoreSet scores;
    scores.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s0 = uniform01(rng);
        double s1 = uniform01(rng);
        if (regime == 1) {
            s0 *= 0.05;
            s1 *= 0.05;
        } else if (regime == 2) {
            s0 = std::round(s0);
            s1 = std::round(s1);
        }
        scores.push_back({s0, s1});
    }
    return scores;
}

}  // namespace

TEST_CASE("counterfactual distribution validates the simplex") {
    CHECK_NOTHROW(CounterfactualDist::make(0.25, 0.25, 0.25, 0.25));
    CHECK_NOTHROW(CounterfactualDist::make(1.0, 0.0, 0.0, 0.0));
    // snap within 1e-9 slack
    CHECK_NOTHROW(CounterfactualDist::make(1.0 + 5e-10, -5e-10, 0.0, 0.0));
    CHECK_THROWS_AS(CounterfactualDist::make(0.5, 0.5, 0.5, -0.5), std::domain_error);
    CHECK_THROWS_AS(CounterfactualDist::make(0.3, 0.3, 0.3, 0.3), std::domain_error);
}

TEST_CASE("score identities s0 = beta+delta, s1 = gamma+delta") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const auto p = dirichlet4(rng, {1.0, 1.0, 1.0, 1.0});
        const CounterfactualDist d = CounterfactualDist::make(p[0], p[1], p[2], p[3]);
        const ScorePair s = scores_from(d);
        CHECK(s.s0 == d.beta + d.delta);
        CHECK(s.s1 == d.gamma + d.delta);
    }
}

TEST_CASE("Frechet bounds at reference score means") {
    const Interval beta = frechet_bounds(0.0449, 0.0460, Quantity::Beta);
    CHECK(beta.lower == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(beta.upper == doctest::Approx(0.0449));
    const Interval gamma = frechet_bounds(0.0449, 0.0460, Quantity::Gamma);
    CHECK(gamma.lower == doctest::Approx(0.0011));
    CHECK(gamma.upper == doctest::Approx(0.0460));
}

TEST_CASE("Frechet bounds degenerate cases") {
    const Interval alpha = frechet_bounds(0.0, 0.0, Quantity::Alpha);
    CHECK(alpha.lower == 1.0);
    CHECK(alpha.upper == 1.0);
    const Interval delta = frechet_bounds(0.5, 0.5, Quantity::Delta);
    CHECK(delta.lower == 0.0);
    CHECK(delta.upper == 0.5);
    CHECK_THROWS_AS(frechet_bounds(1.5, 0.5, Quantity::Beta), std::domain_error);
}

TEST_CASE("Frechet span examples") {
    CHECK(frechet_span(0.5, 0.5) == 0.5);
    CHECK(frechet_span(0.0449, 0.0460) == doctest::Approx(0.0449));
    CHECK(frechet_span(1.0, 0.0) == 0.0);
    CHECK_THROWS_AS(frechet_span(-0.1, 0.5), std::domain_error);
}

TEST_CASE("uplift bounds tighten over Frechet for informative scores") {
    const ScoreSet scores = {{1.0, 0.0}, {0.0, 1.0}};
    const Interval beta = uplift_bounds(scores, Quantity::Beta);
    CHECK(beta.lower == 0.5);
    CHECK(beta.upper == 0.5);
    // Frechet from the means is strictly wider
    const Interval frechet = frechet_bounds(0.5, 0.5, Quantity::Beta);
    CHECK(frechet.lower == 0.0);
    CHECK(frechet.upper == 0.5);
}

TEST_CASE("single constant score reduces uplift bounds to Frechet") {
    const ScoreSet scores = {{0.5, 0.5}};
    const Interval beta = uplift_bounds(scores, Quantity::Beta);
    CHECK(beta.lower == 0.0);
    CHECK(beta.upper == 0.5);
    CHECK_THROWS_AS(uplift_bounds({}, Quantity::Beta), std::invalid_argument);
}

TEST_CASE("uplift bounds contain the true beta under the generative model") {
    // Oracle: for Dirichlet(2,1,1,2) individuals with exact scores, the true
    // population beta is E[beta] = b/A = 1/6.
    Rng rng(42);
    const std::size_t n = 100000;
    ScoreSet scores;
    scores.reserve(n);
    double beta_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = dirichlet4(rng, {2.0, 1.0, 1.0, 2.0});
        scores.push_back({p[1] + p[3], p[2] + p[3]});
        beta_sum += p[1];
    }
    const double beta_true = beta_sum / static_cast<double>(n);
    CHECK(beta_true == doctest::Approx(1.0 / 6.0).epsilon(0.01));
    const Interval bounds = uplift_bounds(scores, Quantity::Beta);
    CHECK(bounds.contains(beta_true));
    CHECK(bounds.contains(1.0 / 6.0));
}

TEST_CASE("uplift bounds span examples") {
    CHECK(uplift_bounds_span({{1.0, 0.0}, {0.0, 1.0}}) == 0.0);
    CHECK(uplift_bounds_span({{0.5, 0.5}}) == 0.5);
    CHECK(uplift_bounds_span({{0.2, 0.1}, {0.4, 0.3}}) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK_THROWS_AS(uplift_bounds_span({}), std::invalid_argument);
}

TEST_CASE("property: Jensen ordering and span equality") {
    Rng rng(123);
    for (int trial = 0; trial < 2000; ++trial) {
        const ScoreSet scores = random_score_set(rng);
        const ScorePair means = mean_scores(scores);
        const double span = uplift_bounds_span(scores);
        for (const Quantity q : kAllQuantities) {
            const Interval uplift = uplift_bounds(scores, q);
            const Interval frechet = frechet_bounds(means.s0, means.s1, q);
            CHECK(uplift.lower <= uplift.upper);
            CHECK(frechet.lower <= uplift.lower + 1e-12);
            CHECK(uplift.upper <= frechet.upper + 1e-12);
            CHECK(std::abs(uplift.width() - span) <= 1e-12);
            CHECK(std::abs(frechet.width() - frechet_span(means.s0, means.s1)) <= 1e-12);
        }
    }
}

TEST_CASE("property: deterministic scores give zero span, constant scores give Frechet") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        // all scores in {0, 1}
        ScoreSet hard;
        const std::size_t n = static_cast<std::size_t>(uniform_int(rng, 1, 30));
        for (std::size_t i = 0; i < n; ++i) {
            hard.push_back({static_cast<double>(uniform_int(rng, 0, 1)),
                            static_cast<double>(uniform_int(rng, 0, 1))});
        }
        CHECK(uplift_bounds_span(hard) == 0.0);

        // identical scores everywhere
        const ScorePair common{uniform01(rng), uniform01(rng)};
        const ScoreSet constant(n, common);
        for (const Quantity q : kAllQuantities) {
            const Interval uplift = uplift_bounds(constant, q);
            const Interval frechet = frechet_bounds(common.s0, common.s1, q);
            CHECK(std::abs(uplift.lower - frechet.lower) <= 1e-12);
            CHECK(std::abs(uplift.upper - frechet.upper) <= 1e-12);
        }
    }
}

TEST_CASE("conditional entropy") {
    const CounterfactualDist degenerate = CounterfactualDist::make(1, 0, 0, 0);
    const CounterfactualDist uniform = CounterfactualDist::make(0.25, 0.25, 0.25, 0.25);
    std::vector<CounterfactualDist> one = {degenerate};
    CHECK(conditional_entropy(one) == 0.0);
    one[0] = uniform;
    CHECK(conditional_entropy(one) == doctest::Approx(std::log(4.0)).epsilon(1e-12));

    // Fixed sensitivity-study point (raw components sum to 1.001; normalized
    // onto the simplex). Frozen value from direct evaluation of -sum p ln p.
    const double norm = 0.947 + 0.020 + 0.017 + 0.017;
    one[0] = CounterfactualDist::make(0.947 / norm, 0.020 / norm, 0.017 / norm, 0.017 / norm);
    CHECK(conditional_entropy(one) == doctest::Approx(0.2690763174).epsilon(1e-8));

    CHECK_THROWS_AS(conditional_entropy(std::span<const CounterfactualDist>{}),
                    std::invalid_argument);
}

TEST_CASE("mean entropy averages over individuals") {
    std::vector<CounterfactualDist> dists = {CounterfactualDist::make(1, 0, 0, 0),
                                             CounterfactualDist::make(0.25, 0.25, 0.25, 0.25)};
    CHECK(conditional_entropy(dists) == doctest::Approx(0.5 * std::log(4.0)));
}
