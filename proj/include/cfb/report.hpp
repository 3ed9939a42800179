#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "cfb/estimation.hpp"
#include "cfb/simulation.hpp"

// Machine-readable artifact writers shared by the CLI and the test suites.
// CSV columns are fixed-order with 17-significant-digit floats; JSON objects
// are emitted with sorted keys. All probabilities are fractions.

namespace cfb {

inline constexpr const char* kToolVersion = "0.1.0";

std::string format_g17(double value);

nlohmann::json interval_to_json(const Interval& interval);
nlohmann::json estimation_report_to_json(const EstimationReport& report);
nlohmann::json benchmark_summary_to_json(const BenchmarkReport& report);

void write_benchmark_runs_csv(const std::string& path, const BenchmarkReport& report,
                              const std::string& prologue = "");
void write_strata_csv(const std::string& path, const BenchmarkReport& report,
                      const std::string& prologue = "");
void write_phi_hist_csv(const std::string& path, const BenchmarkReport& report, int bins = 40,
                        const std::string& prologue = "");
void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& series,
                     const std::string& prologue = "");
void write_sweep_replicates_csv(const std::string& path,
                                const std::vector<SweepRecord>& series,
                                const std::string& prologue = "");

// Writes JSON with sorted keys, 2-space indent, trailing newline.
void write_json(const std::string& path, const nlohmann::json& value);

}  // namespace cfb
