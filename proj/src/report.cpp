#include "cfb/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cfb {

std::string format_g17(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path, const std::string& prologue = "") {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    if (!prologue.empty()) out << "# " << prologue << '\n';
    return out;
}

}  // namespace

nlohmann::json interval_to_json(const Interval& interval) {
    return {{"quantity", to_string(interval.quantity)},
            {"lower", interval.lower},
            {"upper", interval.upper}};
}

nlohmann::json estimation_report_to_json(const EstimationReport& report) {
    nlohmann::json point = {{"alpha", report.point.dist.alpha},
                            {"beta", report.point.dist.beta},
                            {"gamma", report.point.dist.gamma},
                            {"delta", report.point.dist.delta}};
    nlohmann::json uplift, frechet;
    for (std::size_t i = 0; i < 4; ++i) {
        const char* name = to_string(kAllQuantities[i]);
        uplift[name] = interval_to_json(report.uplift_intervals[i]);
        frechet[name] = interval_to_json(report.frechet_intervals[i]);
    }
    return {{"point_estimate", point},
            {"uplift_bounds", uplift},
            {"frechet_bounds", frechet},
            {"score_means", {{"s0", report.score_means.s0}, {"s1", report.score_means.s1}}},
            {"n_samples", report.point.n_samples}};
}

nlohmann::json benchmark_summary_to_json(const BenchmarkReport& report) {
    return {{"runs", report.runs.size()},
            {"mean_uplift_width", report.mean_uplift_width},
            {"mean_frechet_width", report.mean_frechet_width},
            {"rmse_point", report.rmse_point},
            {"rmse_uplift_midpoint", report.rmse_uplift_midpoint},
            {"rmse_frechet_midpoint", report.rmse_frechet_midpoint}};
}

void write_benchmark_runs_csv(const std::string& path, const BenchmarkReport& report,
                              const std::string& prologue) {
    auto out = open_out(path, prologue);
    out << "run,n,v,A,phi_expected";
    for (const char* base :
         {"true", "point", "uplift_lower", "uplift_upper", "frechet_lower", "frechet_upper"}) {
        for (const Quantity q : kAllQuantities) out << ',' << base << '_' << to_string(q);
    }
    out << '\n';
    for (std::size_t r = 0; r < report.runs.size(); ++r) {
        const RunRecord& rec = report.runs[r];
        out << r << ',' << rec.n << ',' << rec.v << ',' << format_g17(rec.concentration)
            << ',' << format_g17(rec.phi_expected);
        for (const auto* arr : {&rec.truth, &rec.point, &rec.uplift_lower, &rec.uplift_upper,
                                &rec.frechet_lower, &rec.frechet_upper}) {
            for (double v : *arr) out << ',' << format_g17(v);
        }
        out << '\n';
    }
}

void write_strata_csv(const std::string& path, const BenchmarkReport& report,
                      const std::string& prologue) {
    auto out = open_out(path, prologue);
    out << "bin_lo,bin_hi,count,mean_true_alpha,mean_point_alpha,mean_uplift_lower,"
           "mean_uplift_upper,mean_frechet_lower,mean_frechet_upper\n";
    for (const Stratum& s : report.alpha_strata) {
        out << format_g17(s.lo) << ',' << format_g17(s.hi) << ',' << s.count << ','
            << format_g17(s.mean_truth) << ',' << format_g17(s.mean_point) << ','
            << format_g17(s.mean_uplift_lower) << ',' << format_g17(s.mean_uplift_upper) << ','
            << format_g17(s.mean_frechet_lower) << ',' << format_g17(s.mean_frechet_upper)
            << '\n';
    }
}

void write_phi_hist_csv(const std::string& path, const BenchmarkReport& report, int bins,
                        const std::string& prologue) {
    auto out = open_out(path, prologue);
    out << "bin_lo,bin_hi,count\n";
    if (report.runs.empty() || bins < 1) return;
    double lo = report.runs.front().phi_expected;
    double hi = lo;
    for (const RunRecord& rec : report.runs) {
        lo = std::min(lo, rec.phi_expected);
        hi = std::max(hi, rec.phi_expected);
    }
    if (hi == lo) hi = lo + 1e-12;
    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    for (const RunRecord& rec : report.runs) {
        const int b = std::min(bins - 1,
                               static_cast<int>((rec.phi_expected - lo) / (hi - lo) * bins));
        ++counts[static_cast<std::size_t>(b)];
    }
    for (int b = 0; b < bins; ++b) {
        const double w = (hi - lo) / bins;
        out << format_g17(lo + b * w) << ',' << format_g17(lo + (b + 1) * w) << ','
            << counts[static_cast<std::size_t>(b)] << '\n';
    }
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& series,
                     const std::string& prologue) {
    auto out = open_out(path, prologue);
    out << "axis_value,mean_entropy,mean_span,mean_abs_error\n";
    for (const SweepRecord& rec : series) {
        out << format_g17(rec.axis_value) << ',' << format_g17(rec.mean_entropy) << ','
            << format_g17(rec.mean_span) << ',' << format_g17(rec.mean_abs_error) << '\n';
    }
}

void write_sweep_replicates_csv(const std::string& path,
                                const std::vector<SweepRecord>& series,
                                const std::string& prologue) {
    auto out = open_out(path, prologue);
    out << "axis_value,replicate,entropy,span,abs_error\n";
    for (const SweepRecord& rec : series) {
        for (std::size_t r = 0; r < rec.entropy.size(); ++r) {
            out << format_g17(rec.axis_value) << ',' << r << ',' << format_g17(rec.entropy[r])
                << ',' << format_g17(rec.span[r]) << ',' << format_g17(rec.abs_error[r])
                << '\n';
        }
    }
}

void write_json(const std::string& path, const nlohmann::json& value) {
    auto out = open_out(path);
    out << value.dump(2) << '\n';
}

}  // namespace cfb
