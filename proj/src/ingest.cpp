#include "cfb/ingest.hpp"

#include "cfb/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cfb {

namespace {

constexpr double kScoreClamp = 1e-6;

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, delim)) cells.push_back(cell);
    if (!line.empty() && line.back() == delim) cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

std::string cell_location(std::size_t row, const std::string& column) {
    return "row " + std::to_string(row) + ", column '" + column + "'";
}

int parse_binary(const std::string& raw, std::size_t row, const std::string& column) {
    double value = 0.0;
    if (!parse_double(raw, value) || (value != 0.0 && value != 1.0)) {
        throw std::runtime_error("column '" + column + "' must be binary 0/1; got '" +
                                 trim(raw) + "' at " + cell_location(row, column));
    }
    return static_cast<int>(value);
}

}  // namespace

void CampaignDataset::check_occupancy(const std::vector<std::size_t>& rows,
                                      const std::string& context) const {
    int counts[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t r : rows) ++counts[treatment[r]][outcome[r]];
    for (int t = 0; t < 2; ++t) {
        for (int y = 0; y < 2; ++y) {
            if (counts[t][y] == 0) {
                throw std::runtime_error(context + ": no rows with treatment=" +
                                         std::to_string(t) + ", outcome=" + std::to_string(y));
            }
        }
    }
}

CampaignDataset load_campaign_csv(const std::string& path, const ColumnSchema& schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("'" + path + "' is empty");
    std::vector<std::string> header = split_line(line, schema.delimiter);
    for (std::string& h : header) h = trim(h);

    auto find_col = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw std::runtime_error("column '" + name + "' not found in '" + path + "'");
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t t_col = find_col(schema.treatment_col);
    const std::size_t y_col = find_col(schema.outcome_col);
    std::optional<std::size_t> id_col;
    if (schema.id_col) id_col = find_col(*schema.id_col);

    std::vector<std::size_t> feat_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c != t_col && c != y_col && (!id_col || c != *id_col)) feat_cols.push_back(c);
    }

    // First pass: raw cells, binary checks, categorical detection.
    std::vector<std::vector<std::string>> raw;
    CampaignDataset ds;
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells = split_line(line, schema.delimiter);
        if (cells.size() != header.size()) {
            throw std::runtime_error("row " + std::to_string(row_no) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(header.size()));
        }
        ds.treatment.push_back(parse_binary(cells[t_col], row_no, schema.treatment_col));
        ds.outcome.push_back(parse_binary(cells[y_col], row_no, schema.outcome_col));
        ds.ids.push_back(id_col ? trim(cells[*id_col]) : std::to_string(raw.size()));
        std::vector<std::string> feats;
        feats.reserve(feat_cols.size());
        for (std::size_t c : feat_cols) feats.push_back(trim(cells[c]));
        raw.push_back(std::move(feats));
    }
    if (raw.empty()) throw std::runtime_error("'" + path + "' has no data rows");

    // A column is categorical if any nonempty cell fails to parse as a number.
    std::vector<bool> categorical(feat_cols.size(), false);
    std::vector<std::set<std::string>> levels(feat_cols.size());
    for (const auto& feats : raw) {
        for (std::size_t j = 0; j < feats.size(); ++j) {
            double value;
            if (!feats[j].empty() && !parse_double(feats[j], value)) categorical[j] = true;
        }
    }
    for (const auto& feats : raw) {
        for (std::size_t j = 0; j < feats.size(); ++j) {
            if (categorical[j] && !feats[j].empty()) levels[j].insert(feats[j]);
        }
    }

    for (std::size_t j = 0; j < feat_cols.size(); ++j) {
        const std::string& name = header[feat_cols[j]];
        if (categorical[j]) {
            for (const std::string& level : levels[j]) {
                ds.feature_names.push_back(name + "=" + level);
            }
        } else {
            ds.feature_names.push_back(name);
        }
    }

    ds.features.reserve(raw.size());
    for (std::size_t r = 0; r < raw.size(); ++r) {
        std::vector<double> row;
        row.reserve(ds.feature_names.size());
        for (std::size_t j = 0; j < feat_cols.size(); ++j) {
            if (categorical[j]) {
                for (const std::string& level : levels[j]) {
                    row.push_back(raw[r][j] == level ? 1.0 : 0.0);
                }
            } else if (raw[r][j].empty()) {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
            } else {
                double value;
                if (!parse_double(raw[r][j], value)) {
                    throw std::runtime_error("unparseable cell at " +
                                             cell_location(r + 2, header[feat_cols[j]]));
                }
                row.push_back(value);
            }
        }
        ds.features.push_back(std::move(row));
    }
    return ds;
}

double LogisticModel::predict(const std::vector<double>& row) const {
    double z = intercept;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        double x = row[j];
        if (std::isnan(x)) x = feature_median[j];
        z += weights[j] * (x - feature_mean[j]) / feature_scale[j];
    }
    const double p = 1.0 / (1.0 + std::exp(-z));
    return std::clamp(p, kScoreClamp, 1.0 - kScoreClamp);
}

namespace {

double median_of(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                     values.end());
    double hi = values[mid];
    if (values.size() % 2 == 0) {
        const double lo =
            *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
        return 0.5 * (lo + hi);
    }
    return hi;
}

// Regularized logistic fit over the given rows. Nesterov-accelerated batch
// gradient descent with a Lipschitz step bound; standardization and median
// imputation are fit on the same rows.
LogisticModel fit_logistic(const CampaignDataset& data, const std::vector<std::size_t>& rows,
                           const ScoreModelSpec& spec) {
    const std::size_t d = data.n_features();
    const double n = static_cast<double>(rows.size());

    LogisticModel model;
    model.feature_median.resize(d);
    model.feature_mean.assign(d, 0.0);
    model.feature_scale.assign(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> observed;
        observed.reserve(rows.size());
        for (std::size_t r : rows) {
            if (!std::isnan(data.features[r][j])) observed.push_back(data.features[r][j]);
        }
        model.feature_median[j] = median_of(std::move(observed));
    }

    // Imputed, standardized design matrix.
    std::vector<std::vector<double>> x(rows.size(), std::vector<double>(d));
    std::vector<int> y(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double v = data.features[rows[i]][j];
            x[i][j] = std::isnan(v) ? model.feature_median[j] : v;
        }
        y[i] = data.outcome[rows[i]];
    }
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (const auto& row : x) mean += row[j];
        mean /= n;
        double var = 0.0;
        for (const auto& row : x) var += (row[j] - mean) * (row[j] - mean);
        var /= n;
        model.feature_mean[j] = mean;
        model.feature_scale[j] = var > 1e-12 ? std::sqrt(var) : 1.0;
        for (auto& row : x) row[j] = (row[j] - mean) / model.feature_scale[j];
    }

    // Lipschitz bound on the gradient: 0.25 * ||X||^2 / n + l2, with the
    // spectral norm bounded by the Frobenius norm.
    double frob2 = n;  // intercept column
    for (const auto& row : x) {
        for (double v : row) frob2 += v * v;
    }
    const double step = 1.0 / (0.25 * frob2 / n + spec.l2_penalty);

    std::vector<double> w(d, 0.0), v_momentum(d, 0.0);
    double b = 0.0, bv = 0.0;
    std::vector<double> grad(d);
    model.converged = false;
    double t_prev = 1.0;
    for (int iter = 0; iter < spec.max_iterations; ++iter) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            double z = bv;
            for (std::size_t j = 0; j < d; ++j) z += v_momentum[j] * x[i][j];
            const double resid = 1.0 / (1.0 + std::exp(-z)) - static_cast<double>(y[i]);
            grad_b += resid;
            for (std::size_t j = 0; j < d; ++j) grad[j] += resid * x[i][j];
        }
        grad_b /= n;
        double gnorm2 = grad_b * grad_b;
        for (std::size_t j = 0; j < d; ++j) {
            grad[j] = grad[j] / n + spec.l2_penalty * v_momentum[j];
            gnorm2 += grad[j] * grad[j];
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_prev * t_prev));
        const double mom = (t_prev - 1.0) / t_next;
        for (std::size_t j = 0; j < d; ++j) {
            const double w_next = v_momentum[j] - step * grad[j];
            v_momentum[j] = w_next + mom * (w_next - w[j]);
            w[j] = w_next;
        }
        const double b_next = bv - step * grad_b;
        bv = b_next + mom * (b_next - b);
        b = b_next;
        t_prev = t_next;
        if (std::sqrt(gnorm2) < 1e-7) {
            model.converged = true;
            break;
        }
    }
    model.weights = std::move(w);
    model.intercept = b;
    return model;
}

double calibrate(double p, double r) {
    // Prior-shift correction for negative-class undersampling at rate r.
    return r * p / (r * p - p + 1.0);
}

}  // namespace

ScorePair ScoreModel::predict(const std::vector<double>& row) const {
    auto arm = [&](const std::vector<LogisticModel>& models,
                   const std::vector<double>& rates) {
        double acc = 0.0;
        for (std::size_t m = 0; m < models.size(); ++m) {
            double p = models[m].predict(row);
            if (calibration && calibrate_before_average) p = calibrate(p, rates[m]);
            acc += p;
        }
        acc /= static_cast<double>(models.size());
        if (calibration && !calibrate_before_average) acc = calibrate(acc, rates[0]);
        return std::clamp(acc, kScoreClamp, 1.0 - kScoreClamp);
    };
    return {arm(control_models, control_rates), arm(treated_models, treated_rates)};
}

ScoreModel train_two_model(const CampaignDataset& train, const ScoreModelSpec& spec,
                           const std::vector<std::size_t>* rows) {
    if (spec.kind != LearnerKind::BaselineTwoModel) {
        throw std::invalid_argument("external-scores spec has no trainable model");
    }
    if (spec.balancing && spec.ensemble_size < 1) {
        throw std::invalid_argument("balancing requires ensemble_size >= 1");
    }
    std::vector<std::size_t> all;
    if (rows == nullptr) {
        all.resize(train.n_rows());
        std::iota(all.begin(), all.end(), 0);
        rows = &all;
    }
    train.check_occupancy(*rows, "training data");

    ScoreModel model;
    model.calibration = spec.calibration;
    model.calibrate_before_average = spec.calibrate_before_average;

    for (int arm = 0; arm < 2; ++arm) {
        std::vector<std::size_t> arm_rows, positives, negatives;
        for (std::size_t r : *rows) {
            if (train.treatment[r] != arm) continue;
            arm_rows.push_back(r);
            (train.outcome[r] == 1 ? positives : negatives).push_back(r);
        }
        auto& models = arm == 0 ? model.control_models : model.treated_models;
        auto& rates = arm == 0 ? model.control_rates : model.treated_rates;

        if (!spec.balancing) {
            models.push_back(fit_logistic(train, arm_rows, spec));
            rates.push_back(1.0);
            continue;
        }

        // EasyEnsemble: all positives plus an equal-size negative sample,
        // drawn without replacement, per base learner.
        const std::size_t n_neg = std::min(positives.size(), negatives.size());
        const double r_ratio =
            static_cast<double>(n_neg) / static_cast<double>(negatives.size());
        Rng rng(derive_seed(spec.seed, 0xB0 + static_cast<std::uint64_t>(arm)));
        for (int k = 0; k < spec.ensemble_size; ++k) {
            std::vector<std::size_t> pool = negatives;
            for (std::size_t i = 0; i < n_neg; ++i) {
                const auto pick = static_cast<std::size_t>(
                    uniform_int(rng, static_cast<std::int64_t>(i),
                                static_cast<std::int64_t>(pool.size()) - 1));
                std::swap(pool[i], pool[pick]);
            }
            std::vector<std::size_t> subset(positives);
            subset.insert(subset.end(), pool.begin(),
                          pool.begin() + static_cast<std::ptrdiff_t>(n_neg));
            std::sort(subset.begin(), subset.end());
            models.push_back(fit_logistic(train, subset, spec));
            rates.push_back(r_ratio);
        }
    }
    model.converged = true;
    for (const auto* group : {&model.control_models, &model.treated_models}) {
        for (const LogisticModel& m : *group) model.converged = model.converged && m.converged;
    }
    return model;
}

ScoreSet cross_validate(const CampaignDataset& dataset, const ScoreModelSpec& spec,
                        int k_folds, std::uint64_t seed) {
    if (k_folds < 2) throw std::invalid_argument("cross-validation requires k >= 2");
    const std::size_t n = dataset.n_rows();
    if (static_cast<std::size_t>(k_folds) > n) {
        throw std::invalid_argument("more folds than rows");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, 0xCF));
    for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[static_cast<std::size_t>(
                                    uniform_int(rng, 0, static_cast<std::int64_t>(i) - 1))]);
    }
    std::vector<int> fold_of(n);
    for (std::size_t i = 0; i < n; ++i) fold_of[order[i]] = static_cast<int>(i) % k_folds;

    ScoreSet out(n);
    for (int fold = 0; fold < k_folds; ++fold) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t r = 0; r < n; ++r) {
            (fold_of[r] == fold ? test_rows : train_rows).push_back(r);
        }
        try {
            dataset.check_occupancy(train_rows, "fold " + std::to_string(fold));
        } catch (const std::runtime_error& e) {
            throw std::runtime_error(std::string("cross-validation: ") + e.what());
        }
        ScoreModelSpec fold_spec = spec;
        fold_spec.seed = derive_seed(seed, 0xF0 + static_cast<std::uint64_t>(fold));
        const ScoreModel model = train_two_model(dataset, fold_spec, &train_rows);
        for (std::size_t r : test_rows) out[r] = model.predict(dataset.features[r]);
    }
    return out;
}

ScoreFile read_score_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("'" + path + "' is empty");
    const std::vector<std::string> header = split_line(line, ',');
    std::vector<std::string> names;
    for (const std::string& h : header) names.push_back(trim(h));

    const std::vector<std::string> required = {"id", "s0_hat", "s1_hat"};
    if (names.size() < 3 || names[0] != "id" || names[1] != "s0_hat" || names[2] != "s1_hat") {
        throw std::runtime_error("score file '" + path +
                                 "' must start with columns id,s0_hat,s1_hat");
    }
    const bool has_ty = names.size() >= 5 && names[3] == "t" && names[4] == "y";
    if (names.size() != 3 && !has_ty) {
        throw std::runtime_error("score file '" + path +
                                 "' has unexpected columns; expected id,s0_hat,s1_hat[,t,y]");
    }

    ScoreFile file;
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_line(line, ',');
        if (cells.size() != names.size()) {
            throw std::runtime_error("score file row " + std::to_string(row_no) +
                                     " has wrong cell count");
        }
        double s0, s1;
        if (!parse_double(cells[1], s0) || !parse_double(cells[2], s1)) {
            throw std::runtime_error("unparseable score at row " + std::to_string(row_no));
        }
        try {
            s0 = checked_probability(s0, "s0_hat");
            s1 = checked_probability(s1, "s1_hat");
        } catch (const std::domain_error& e) {
            throw std::runtime_error("score file row " + std::to_string(row_no) + ": " +
                                     e.what());
        }
        file.ids.push_back(trim(cells[0]));
        file.scores.push_back({s0, s1});
        if (has_ty) {
            file.treatment.push_back(parse_binary(cells[3], row_no, "t"));
            file.outcome.push_back(parse_binary(cells[4], row_no, "y"));
        }
    }
    if (file.scores.empty()) throw std::runtime_error("'" + path + "' has no score rows");
    return file;
}

void write_score_file(const std::string& path, const ScoreFile& file) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    const bool has_ty = !file.treatment.empty();
    out << (has_ty ? "id,s0_hat,s1_hat,t,y\n" : "id,s0_hat,s1_hat\n");
    char buf[64];
    for (std::size_t i = 0; i < file.scores.size(); ++i) {
        out << (i < file.ids.size() ? file.ids[i] : std::to_string(i));
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g", file.scores[i].s0, file.scores[i].s1);
        out << buf;
        if (has_ty) out << ',' << file.treatment[i] << ',' << file.outcome[i];
        out << '\n';
    }
}

}  // namespace cfb
