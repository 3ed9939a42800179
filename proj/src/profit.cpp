#include "cfb/profit.hpp"

#include <cfenv>
#include <cmath>
#include <stdexcept>

namespace cfb {

namespace {

// Nearest integer, ties to even.
std::int64_t round_count(double x) {
    return static_cast<std::int64_t>(std::nearbyint(x));
}

}  // namespace

double realized_profit(std::int64_t n_contacted, double uplift, double value, double cost) {
    if (n_contacted < 0) throw std::domain_error("contact count must be nonnegative");
    const double n = static_cast<double>(n_contacted);
    return n * uplift * value - n * cost;
}

PersuadableCounts persuadable_counts(std::int64_t population, double beta_point,
                                     const Interval& beta_interval) {
    if (population < 0) throw std::domain_error("population must be nonnegative");
    const double pop = static_cast<double>(population);
    return {round_count(pop * beta_point), round_count(pop * beta_interval.lower),
            round_count(pop * beta_interval.upper)};
}

std::pair<double, double> profit_range(std::int64_t population, const Interval& beta_interval,
                                       double value, double cost) {
    const double margin = value - cost;
    const double pop = static_cast<double>(population);
    return {static_cast<double>(round_count(pop * beta_interval.lower)) * margin,
            static_cast<double>(round_count(pop * beta_interval.upper)) * margin};
}

}  // namespace cfb
