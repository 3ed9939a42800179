#include "cfb/estimation.hpp"

#include "cfb/rng.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cfb {

PointEstimate point_estimates(const ScoreSet& scores) {
    if (scores.empty()) {
        throw std::invalid_argument("score set is empty: expectation undefined");
    }
    double a = 0.0, b = 0.0, g = 0.0, d = 0.0;
    for (const ScorePair& p : scores) {
        const double s0 = checked_probability(p.s0, "s0");
        const double s1 = checked_probability(p.s1, "s1");
        a += (1.0 - s0) * (1.0 - s1);
        b += s0 * (1.0 - s1);
        g += (1.0 - s0) * s1;
        d += s0 * s1;
    }
    const double n = static_cast<double>(scores.size());
    return {CounterfactualDist::make(a / n, b / n, g / n, d / n), scores.size()};
}

CounterfactualDist midpoint_estimates(const ScoreSet& scores) {
    CounterfactualDist out;
    out.alpha = uplift_bounds(scores, Quantity::Alpha).midpoint();
    out.beta = uplift_bounds(scores, Quantity::Beta).midpoint();
    out.gamma = uplift_bounds(scores, Quantity::Gamma).midpoint();
    out.delta = uplift_bounds(scores, Quantity::Delta).midpoint();
    return out;
}

double phi_population(std::span<const CounterfactualDist> dists) {
    if (dists.empty()) {
        throw std::invalid_argument("phi of an empty collection is undefined");
    }
    const double n = static_cast<double>(dists.size());
    double ma = 0.0, mb = 0.0, mg = 0.0, md = 0.0;
    double m0 = 0.0, m1 = 0.0, m01 = 0.0;
    for (const CounterfactualDist& d : dists) {
        ma += d.alpha;
        mb += d.beta;
        mg += d.gamma;
        md += d.delta;
        const ScorePair s = scores_from(d);
        m0 += s.s0;
        m1 += s.s1;
        m01 += s.s0 * s.s1;
    }
    ma /= n; mb /= n; mg /= n; md /= n;
    m0 /= n; m1 /= n; m01 /= n;
    const double cov = m01 - m0 * m1;  // population formula
    return ma * md - mb * mg - cov;
}

BiasReport bias_report(std::span<const CounterfactualDist> dists,
                       std::optional<double> model_cov_term) {
    if (dists.empty()) {
        throw std::invalid_argument("bias report of an empty collection is undefined");
    }
    const double n = static_cast<double>(dists.size());
    double m0 = 0.0, m1 = 0.0, m01 = 0.0;
    for (const CounterfactualDist& d : dists) {
        const ScorePair s = scores_from(d);
        m0 += s.s0;
        m1 += s.s1;
        m01 += s.s0 * s.s1;
    }
    BiasReport report;
    report.cov_scores = m01 / n - (m0 / n) * (m1 / n);
    report.phi_mean = phi_population(dists);
    report.model_cov_term = model_cov_term;
    report.bias_beta = report.phi_mean - model_cov_term.value_or(0.0);
    return report;
}

double theoretical_bias(double a, double b, double c, double d) {
    if (!(a > 0.0 && b > 0.0 && c > 0.0 && d > 0.0)) {
        throw std::domain_error("Dirichlet weights must be positive");
    }
    const double A = a + b + c + d;
    return (a * d - b * c) / (A * (A + 1.0));
}

EstimationReport make_report(const ScoreSet& scores) {
    EstimationReport report;
    report.point = point_estimates(scores);
    report.score_means = mean_scores(scores);
    for (std::size_t i = 0; i < 4; ++i) {
        const Quantity q = kAllQuantities[i];
        report.uplift_intervals[i] = uplift_bounds(scores, q);
        report.frechet_intervals[i] =
            frechet_bounds(report.score_means.s0, report.score_means.s1, q);
    }
    return report;
}

EstimationReport run_algorithm_one(const CampaignDataset& dataset,
                                   const ScoreModelSpec& learner, const SplitSpec& split,
                                   ScoreSet* out_scores) {
    ScoreSet scores;
    if (split.mode == SplitSpec::Mode::KFold) {
        scores = cross_validate(dataset, learner, split.k_folds, split.seed);
    } else {
        // Literal single split: shuffle, train on the head, score the tail.
        std::vector<std::size_t> order(dataset.n_rows());
        std::iota(order.begin(), order.end(), 0);
        Rng rng(derive_seed(split.seed, 0x51));
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[static_cast<std::size_t>(uniform_int(
                                        rng, 0, static_cast<std::int64_t>(i) - 1))]);
        }
        const auto n_test = static_cast<std::size_t>(
            std::round(split.test_fraction * static_cast<double>(order.size())));
        if (n_test == 0 || n_test >= order.size()) {
            throw std::invalid_argument("degenerate split: empty train or test portion");
        }
        std::vector<std::size_t> train_rows(order.begin(),
                                            order.end() - static_cast<std::ptrdiff_t>(n_test));
        dataset.check_occupancy(train_rows, "training split");
        const ScoreModel model = train_two_model(dataset, learner, &train_rows);
        scores.reserve(n_test);
        for (auto it = order.end() - static_cast<std::ptrdiff_t>(n_test); it != order.end();
             ++it) {
            scores.push_back(model.predict(dataset.features[*it]));
        }
    }
    if (out_scores != nullptr) *out_scores = scores;
    return make_report(scores);
}

}  // namespace cfb
