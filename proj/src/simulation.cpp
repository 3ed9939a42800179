#include "cfb/simulation.hpp"

#include "cfb/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace cfb {

void SimulationParams::validate() const {
    if (n < 1) throw std::invalid_argument("simulation requires n >= 1");
    if (v < 1) throw std::invalid_argument("simulation requires v >= 1");
    for (double w : dirichlet) {
        if (!(w > 0.0)) throw std::invalid_argument("Dirichlet weights must be positive");
    }
}

ScoreSet SimulatedPopulation::exact_scores() const {
    ScoreSet out;
    out.reserve(individuals.size());
    for (const Individual& ind : individuals) out.push_back({ind.s0, ind.s1});
    return out;
}

ScoreSet SimulatedPopulation::noisy_scores() const {
    ScoreSet out;
    out.reserve(individuals.size());
    for (const Individual& ind : individuals) out.push_back({ind.s0_hat, ind.s1_hat});
    return out;
}

std::vector<CounterfactualDist> SimulatedPopulation::dists() const {
    std::vector<CounterfactualDist> out;
    out.reserve(individuals.size());
    for (const Individual& ind : individuals) out.push_back(ind.dist);
    return out;
}

SimulatedPopulation sample_population(const SimulationParams& params) {
    params.validate();
    Rng rng(params.seed);
    SimulatedPopulation pop;
    pop.individuals.resize(params.n);
    double ma = 0.0, mb = 0.0, mg = 0.0, md = 0.0;
    const double v = static_cast<double>(params.v);
    for (Individual& ind : pop.individuals) {
        const std::array<double, 4> p = dirichlet4(rng, params.dirichlet);
        ind.dist = {p[0], p[1], p[2], p[3]};
        ind.s0 = p[1] + p[3];
        ind.s1 = p[2] + p[3];
        ind.s0_hat = static_cast<double>(binomial(rng, params.v, ind.s0)) / v;
        ind.s1_hat = static_cast<double>(binomial(rng, params.v, ind.s1)) / v;
        const int cell = categorical4(rng, p);
        ind.y0 = (cell == 1 || cell == 3) ? 1 : 0;  // beta and delta have Y0 = 1
        ind.y1 = (cell == 2 || cell == 3) ? 1 : 0;  // gamma and delta have Y1 = 1
        ma += p[0];
        mb += p[1];
        mg += p[2];
        md += p[3];
    }
    const double n = static_cast<double>(params.n);
    pop.truth = {ma / n, mb / n, mg / n, md / n};
    return pop;
}

namespace {

RunRecord execute_run(const BenchmarkProtocol& protocol, std::uint64_t run_seed) {
    Rng rng(run_seed);

    RunRecord rec;
    // N log-uniform over its range (it spans three orders of magnitude).
    const double log_n = uniform_real(rng, std::log(static_cast<double>(protocol.n_min)),
                                      std::log(static_cast<double>(protocol.n_max)));
    rec.n = std::clamp(static_cast<std::size_t>(std::llround(std::exp(log_n))),
                       protocol.n_min, protocol.n_max);
    rec.v = static_cast<int>(uniform_int(rng, protocol.v_min, protocol.v_max));
    // A sampled uniformly on the square-root scale; see the benchmark notes
    // in the README for how this law was chosen.
    const double sq = uniform_real(rng, std::sqrt(protocol.a_min), std::sqrt(protocol.a_max));
    rec.concentration = sq * sq;
    // Uniform point on the simplex = Dirichlet(1,1,1,1).
    const std::array<double, 4> simplex = dirichlet4(rng, {1.0, 1.0, 1.0, 1.0});

    SimulationParams params;
    params.n = rec.n;
    params.v = rec.v;
    for (int i = 0; i < 4; ++i) params.dirichlet[i] = rec.concentration * simplex[i];
    params.seed = rng();

    const SimulatedPopulation pop = sample_population(params);
    const ScoreSet noisy = pop.noisy_scores();
    const EstimationReport report = make_report(noisy);

    for (std::size_t i = 0; i < 4; ++i) {
        const Quantity q = kAllQuantities[i];
        rec.truth[i] = pop.truth[q];
        rec.point[i] = report.point.dist[q];
        rec.uplift_lower[i] = report.uplift_intervals[i].lower;
        rec.uplift_upper[i] = report.uplift_intervals[i].upper;
        rec.frechet_lower[i] = report.frechet_intervals[i].lower;
        rec.frechet_upper[i] = report.frechet_intervals[i].upper;
    }
    rec.phi_expected = theoretical_bias(params.dirichlet[0], params.dirichlet[1],
                                        params.dirichlet[2], params.dirichlet[3]);
    return rec;
}

}  // namespace

BenchmarkReport run_benchmark(const BenchmarkProtocol& protocol) {
    if (protocol.runs < 1) throw std::invalid_argument("benchmark requires runs >= 1");

    BenchmarkReport report;
    report.runs.resize(protocol.runs);

    const int n_threads = std::max(1, protocol.threads);
    auto worker = [&](std::size_t first, std::size_t step) {
        for (std::size_t r = first; r < protocol.runs; r += step) {
            report.runs[r] = execute_run(protocol, derive_seed(protocol.seed, r));
        }
    };
    if (n_threads == 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) {
            pool.emplace_back(worker, static_cast<std::size_t>(t),
                              static_cast<std::size_t>(n_threads));
        }
        for (std::thread& th : pool) th.join();
    }

    // Aggregates, reported for beta (widths are quantity-independent).
    constexpr std::size_t kBeta = 1;
    double uw = 0.0, fw = 0.0, se_pt = 0.0, se_um = 0.0, se_fm = 0.0;
    for (const RunRecord& rec : report.runs) {
        uw += rec.uplift_upper[kBeta] - rec.uplift_lower[kBeta];
        fw += rec.frechet_upper[kBeta] - rec.frechet_lower[kBeta];
        const double truth = rec.truth[kBeta];
        const double um = 0.5 * (rec.uplift_lower[kBeta] + rec.uplift_upper[kBeta]);
        const double fm = 0.5 * (rec.frechet_lower[kBeta] + rec.frechet_upper[kBeta]);
        se_pt += (rec.point[kBeta] - truth) * (rec.point[kBeta] - truth);
        se_um += (um - truth) * (um - truth);
        se_fm += (fm - truth) * (fm - truth);
    }
    const double n = static_cast<double>(report.runs.size());
    report.mean_uplift_width = uw / n;
    report.mean_frechet_width = fw / n;
    report.rmse_point = std::sqrt(se_pt / n);
    report.rmse_uplift_midpoint = std::sqrt(se_um / n);
    report.rmse_frechet_midpoint = std::sqrt(se_fm / n);

    // Strata over true alpha: 10 equal-width bins, bins with < 20 runs dropped.
    constexpr int kBins = 10;
    constexpr std::size_t kMinRuns = 20;
    std::vector<Stratum> strata(kBins);
    for (int b = 0; b < kBins; ++b) {
        strata[b].lo = static_cast<double>(b) / kBins;
        strata[b].hi = static_cast<double>(b + 1) / kBins;
    }
    for (const RunRecord& rec : report.runs) {
        const double a = rec.truth[0];
        int b = std::min(kBins - 1, static_cast<int>(a * kBins));
        Stratum& s = strata[static_cast<std::size_t>(b)];
        ++s.count;
        s.mean_truth += rec.truth[0];
        s.mean_point += rec.point[0];
        s.mean_uplift_lower += rec.uplift_lower[0];
        s.mean_uplift_upper += rec.uplift_upper[0];
        s.mean_frechet_lower += rec.frechet_lower[0];
        s.mean_frechet_upper += rec.frechet_upper[0];
    }
    for (Stratum& s : strata) {
        if (s.count < kMinRuns) continue;
        const double c = static_cast<double>(s.count);
        s.mean_truth /= c;
        s.mean_point /= c;
        s.mean_uplift_lower /= c;
        s.mean_uplift_upper /= c;
        s.mean_frechet_lower /= c;
        s.mean_frechet_upper /= c;
        report.alpha_strata.push_back(s);
    }
    return report;
}

std::vector<SweepRecord> sensitivity_sweep(SweepAxis axis, const std::vector<double>& grid,
                                           const SimulationParams& fixed,
                                           std::size_t replicates) {
    if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw std::invalid_argument("sweep grid must be strictly increasing");
        }
    }
    if (replicates < 1) throw std::invalid_argument("sweep requires replicates >= 1");

    // The fixed Dirichlet weights encode a simplex point scaled by A; an
    // A-sweep rescales that point, keeping its direction.
    const double fixed_a =
        fixed.dirichlet[0] + fixed.dirichlet[1] + fixed.dirichlet[2] + fixed.dirichlet[3];

    std::vector<SweepRecord> series;
    series.reserve(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        SweepRecord rec;
        rec.axis_value = grid[g];
        for (std::size_t r = 0; r < replicates; ++r) {
            SimulationParams params = fixed;
            params.seed = derive_seed(fixed.seed, g * replicates + r);
            switch (axis) {
                case SweepAxis::A:
                    for (double& w : params.dirichlet) w *= grid[g] / fixed_a;
                    break;
                case SweepAxis::N:
                    params.n = static_cast<std::size_t>(std::llround(grid[g]));
                    break;
                case SweepAxis::V:
                    params.v = static_cast<int>(std::llround(grid[g]));
                    break;
            }
            const SimulatedPopulation pop = sample_population(params);
            const auto dists = pop.dists();
            const ScoreSet noisy = pop.noisy_scores();
            rec.entropy.push_back(conditional_entropy(dists));
            rec.span.push_back(uplift_bounds_span(noisy));
            const double beta_hat = point_estimates(noisy).dist.beta;
            rec.abs_error.push_back(std::abs(beta_hat - pop.truth.beta));
        }
        const double n = static_cast<double>(replicates);
        for (double e : rec.entropy) rec.mean_entropy += e;
        for (double s : rec.span) rec.mean_span += s;
        for (double e : rec.abs_error) rec.mean_abs_error += e;
        rec.mean_entropy /= n;
        rec.mean_span /= n;
        rec.mean_abs_error /= n;
        series.push_back(std::move(rec));
    }
    return series;
}

}  // namespace cfb
