#pragma once

#include <cstdint>
#include <utility>

#include "cfb/core.hpp"

// Campaign economics. Currency values are plain doubles with the unit left to
// the caller; the analysis is illustrative, not accounting-grade.

namespace cfb {

struct PersuadableCounts {
    std::int64_t point = 0;
    std::int64_t lower = 0;
    std::int64_t upper = 0;
};

// Profit of the campaign as it happened: n*uplift*value - n*cost.
double realized_profit(std::int64_t n_contacted, double uplift, double value, double cost);

// population * beta rounded to the nearest integer (ties to even) at the
// point estimate and both interval endpoints.
PersuadableCounts persuadable_counts(std::int64_t population, double beta_point,
                                     const Interval& beta_interval);

// Persuadable-only scenario at both interval endpoints: each contacted
// persuadable converts and yields value - cost.
std::pair<double, double> profit_range(std::int64_t population, const Interval& beta_interval,
                                       double value, double cost);

}  // namespace cfb
