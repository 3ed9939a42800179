#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cfb/core.hpp"

// Campaign data ingestion and the baseline two-model uplift learner.

namespace cfb {

// Rows of (features, treatment, outcome) after encoding. Features are
// fixed-width doubles; missing numeric cells are stored as NaN and imputed
// with the training-split median when a model is fit.
struct CampaignDataset {
    std::vector<std::vector<double>> features;  // row-major
    std::vector<int> treatment;                 // 0 = control, 1 = treated
    std::vector<int> outcome;                   // 0 / 1
    std::vector<std::string> ids;               // row ids (row index if absent)
    std::vector<std::string> feature_names;

    std::size_t n_rows() const { return features.size(); }
    std::size_t n_features() const { return feature_names.size(); }

    // Throws if a (treatment, outcome) cell is empty among the given rows.
    void check_occupancy(const std::vector<std::size_t>& rows,
                         const std::string& context) const;
};

struct ColumnSchema {
    std::string treatment_col;
    std::string outcome_col;
    std::optional<std::string> id_col;
    char delimiter = ',';
};

// Parses a campaign CSV. Categorical (non-numeric) columns are one-hot
// encoded; empty numeric cells become NaN. Row order is preserved.
CampaignDataset load_campaign_csv(const std::string& path, const ColumnSchema& schema);

enum class LearnerKind { BaselineTwoModel, ExternalScores };

struct ScoreModelSpec {
    LearnerKind kind = LearnerKind::BaselineTwoModel;
    bool balancing = false;        // EasyEnsemble negative undersampling
    int ensemble_size = 10;        // k base learners when balancing
    bool calibration = true;       // undersampling prior-shift correction
    bool calibrate_before_average = true;  // calibrate each base learner, then average
    double l2_penalty = 1e-3;
    int max_iterations = 500;
    std::uint64_t seed = 0;
};

// A single regularized logistic model over standardized features, fit by
// deterministic batch gradient descent (Nesterov acceleration, Lipschitz
// step size).
struct LogisticModel {
    std::vector<double> feature_mean;
    std::vector<double> feature_scale;
    std::vector<double> feature_median;  // imputation values
    std::vector<double> weights;
    double intercept = 0.0;
    bool converged = true;

    double predict(const std::vector<double>& row) const;
};

// Two independent outcome models, one per treatment arm. With balancing, each
// arm is an average of base learners with the undersampling calibration map
// p = r*ps / (r*ps - ps + 1) applied (r = retained-negative ratio).
struct ScoreModel {
    std::vector<LogisticModel> control_models;  // predict s0
    std::vector<LogisticModel> treated_models;  // predict s1
    std::vector<double> control_rates;          // calibration ratio r per base learner
    std::vector<double> treated_rates;
    bool calibration = true;
    bool calibrate_before_average = true;
    bool converged = true;

    ScorePair predict(const std::vector<double>& row) const;
};

ScoreModel train_two_model(const CampaignDataset& train, const ScoreModelSpec& spec,
                           const std::vector<std::size_t>* rows = nullptr);

// Out-of-fold scores: each row scored exactly once by a model not trained on
// it; output order matches input order.
ScoreSet cross_validate(const CampaignDataset& dataset, const ScoreModelSpec& spec,
                        int k_folds, std::uint64_t seed);

// Score-file interchange: CSV with header id,s0_hat,s1_hat[,t,y].
struct ScoreFile {
    std::vector<std::string> ids;
    ScoreSet scores;
    std::vector<int> treatment;  // empty if the columns are absent
    std::vector<int> outcome;
};

ScoreFile read_score_file(const std::string& path);
void write_score_file(const std::string& path, const ScoreFile& file);

}  // namespace cfb
