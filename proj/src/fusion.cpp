#include "statfuse/fusion.hpp"
#include "statfuse/error.hpp"
#include "statfuse/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace statfuse {

namespace {

double minutes_since(std::chrono::steady_clock::time_point start) {
    const auto elapsed = std::chrono::steady_clock::now() - start;
    return std::chrono::duration<double>(elapsed).count() / 60.0;
}

Eigen::VectorXd validate_cnn_row(const std::string& image_id, Eigen::VectorXd row) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < row.size(); ++i) {
        if (!std::isfinite(row(i)) || row(i) < 0.0) {
            throw InputError("InvalidProbabilityRow",
                             "negative or non-finite probability for image_id " + image_id);
        }
        sum += row(i);
    }
    if (std::abs(sum - 1.0) > 1e-4) {
        throw InputError("InvalidProbabilityRow",
                         "probabilities for image_id " + image_id + " sum to " +
                             format_double(sum) + ", outside the 1e-4 tolerance");
    }
    return row / sum;
}

} // namespace

Eigen::MatrixXd CnnProbabilityTable::rows_for(const std::vector<std::string>& ids) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(ids.size()), num_classes());
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        auto it = rows.find(ids[i]);
        if (it == rows.end()) {
            missing.push_back(ids[i]);
            continue;
        }
        out.row(static_cast<Eigen::Index>(i)) = it->second;
    }
    if (!missing.empty()) {
        std::string list;
        for (std::size_t i = 0; i < missing.size() && i < 5; ++i) {
            list += (i ? ", " : "") + missing[i];
        }
        if (missing.size() > 5) list += ", ...";
        throw InputError("MissingProbabilities",
                         "no CNN probabilities for image_ids: " + list);
    }
    return out;
}

CnnProbabilityTable make_cnn_table(std::vector<std::string> label_names,
                                   std::vector<std::pair<std::string, Eigen::VectorXd>> rows,
                                   std::string provenance) {
    CnnProbabilityTable t;
    t.label_names = std::move(label_names);
    t.provenance = std::move(provenance);
    for (auto& [id, row] : rows) {
        if (row.size() != t.num_classes()) {
            throw InputError("DimensionMismatch", "probability row width mismatch for " + id);
        }
        if (!t.rows.emplace(id, validate_cnn_row(id, std::move(row))).second) {
            throw InputError("DuplicateImageId", "duplicate image_id in CNN table: " + id);
        }
    }
    return t;
}

CnnProbabilityTable load_cnn_table(const std::string& path,
                                   const std::vector<std::string>& expected_labels) {
    const auto rows = parse_csv(read_file(path));
    if (rows.size() < 2) throw InputError("EmptyInput", "CNN table has no data rows: " + path);
    const auto& header = rows.front();
    if (header.size() < 3 || header[0] != "image_id") {
        throw InputError("BadCnnTable", "expected header image_id,<label columns>");
    }
    std::vector<std::string> labels(header.begin() + 1, header.end());
    if (!expected_labels.empty() && labels != expected_labels) {
        throw InputError("BadCnnTable",
                         "CNN table label columns do not match the manifest label set/order");
    }

    std::vector<std::pair<std::string, Eigen::VectorXd>> parsed;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != header.size()) {
            throw InputError("BadCnnTable", "row " + std::to_string(i) + " has wrong field count");
        }
        Eigen::VectorXd v(static_cast<Eigen::Index>(labels.size()));
        for (std::size_t j = 0; j < labels.size(); ++j) {
            try {
                v(static_cast<Eigen::Index>(j)) = std::stod(r[j + 1]);
            } catch (const std::exception&) {
                throw InputError("BadCnnTable", "non-numeric probability: " + r[j + 1]);
            }
        }
        parsed.emplace_back(r[0], std::move(v));
    }
    return make_cnn_table(std::move(labels), std::move(parsed), path);
}

void save_cnn_table(const CnnProbabilityTable& table, const std::string& path) {
    std::ostringstream out;
    out << "image_id";
    for (const auto& label : table.label_names) out << ',' << label;
    out << "\n";
    for (const auto& [id, row] : table.rows) {
        out << id;
        for (Eigen::Index j = 0; j < row.size(); ++j) out << ',' << format_double(row(j));
        out << "\n";
    }
    atomic_write_file(path, out.str());
}

Eigen::VectorXd fuse_average(const Eigen::VectorXd& p_cnn, const Eigen::VectorXd& p_feat) {
    if (p_cnn.size() != p_feat.size()) {
        throw InputError("DimensionMismatch", "probability vectors differ in length");
    }
    return 0.5 * (p_cnn + p_feat);
}

std::vector<std::vector<int>> confusion_matrix(const std::vector<int>& y_true,
                                               const std::vector<int>& y_pred,
                                               int num_classes) {
    if (y_true.size() != y_pred.size()) {
        throw InputError("DimensionMismatch", "label vectors differ in length");
    }
    std::vector<std::vector<int>> cm(num_classes, std::vector<int>(num_classes, 0));
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] < 0 || y_true[i] >= num_classes || y_pred[i] < 0 ||
            y_pred[i] >= num_classes) {
            throw InputError("BadLabel", "label outside [0, K)");
        }
        cm[y_true[i]][y_pred[i]] += 1;
    }
    return cm;
}

double weighted_precision(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                          int num_classes) {
    if (y_true.empty()) throw InputError("EmptyInput", "no labels to score");
    const auto cm = confusion_matrix(y_true, y_pred, num_classes);
    const double n = static_cast<double>(y_true.size());
    double total = 0.0;
    for (int c = 0; c < num_classes; ++c) {
        int support = 0, predicted = 0;
        for (int other = 0; other < num_classes; ++other) {
            support += cm[c][other];
            predicted += cm[other][c];
        }
        const double precision = predicted > 0 ? cm[c][c] / static_cast<double>(predicted) : 0.0;
        total += (support / n) * precision;
    }
    return total;
}

std::unique_ptr<Classifier> train_fusion(const std::string& kind,
                                         const CnnProbabilityTable& cnn,
                                         const Classifier& feature_model,
                                         const LabeledDataset& ds, Split fusion_split,
                                         const Hyperparams& hp, std::uint64_t seed) {
    if (fusion_split == Split::test) {
        throw InputError("BadConfig", "fusion must train on the train or valid split");
    }
    const std::vector<int> idx = ds.rows_in(fusion_split);
    if (idx.empty()) throw InputError("EmptySplit", "fusion split has no rows");

    std::vector<std::string> ids;
    ids.reserve(idx.size());
    for (int i : idx) ids.push_back(ds.ids[i]);

    const Eigen::MatrixXd cnn_probs = cnn.rows_for(ids);
    const Eigen::MatrixXd feat_probs = feature_model.predict_proba(ds.rows(idx));
    Eigen::MatrixXd concat(cnn_probs.rows(), cnn_probs.cols() + feat_probs.cols());
    concat << cnn_probs, feat_probs;

    return train_classifier(kind, concat, ds.labels_at(idx), ds.label_names, hp, seed);
}

std::string method_name_for_kind(const std::string& fusion_kind) {
    return fusion_kind == "average" ? "avg_fusion" : "fusion_" + fusion_kind;
}

const MethodResult* EvaluationReport::find(const std::string& method) const {
    for (const auto& [name, result] : methods) {
        if (name == method) return &result;
    }
    return nullptr;
}

namespace {

MethodResult summarize(std::vector<double> per_seed, bool deterministic,
                       const std::vector<int>& y_true, const std::vector<int>& first_pred,
                       const std::vector<std::string>& labels) {
    const int k = static_cast<int>(labels.size());
    MethodResult r;
    r.deterministic = deterministic;
    r.per_seed_weighted_precision = std::move(per_seed);

    double mean = 0.0;
    for (double v : r.per_seed_weighted_precision) mean += v;
    mean /= static_cast<double>(r.per_seed_weighted_precision.size());
    r.mean_weighted_precision = mean;
    if (deterministic) {
        r.std_weighted_precision = 0.0;
    } else {
        double var = 0.0;
        for (double v : r.per_seed_weighted_precision) var += (v - mean) * (v - mean);
        var /= static_cast<double>(r.per_seed_weighted_precision.size());
        r.std_weighted_precision = std::sqrt(var);
    }

    r.confusion = confusion_matrix(y_true, first_pred, k);
    int correct = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) correct += y_true[i] == first_pred[i];
    r.accuracy = correct / static_cast<double>(y_true.size());
    for (int c = 0; c < k; ++c) {
        PerClassMetrics m;
        m.label = labels[c];
        int support = 0, predicted = 0;
        for (int other = 0; other < k; ++other) {
            support += r.confusion[c][other];
            predicted += r.confusion[other][c];
        }
        m.support = support;
        m.precision = predicted > 0 ? r.confusion[c][c] / static_cast<double>(predicted) : 0.0;
        m.recall = support > 0 ? r.confusion[c][c] / static_cast<double>(support) : 0.0;
        r.per_class.push_back(std::move(m));
    }
    return r;
}

std::vector<int> argmax_rows(const Eigen::MatrixXd& probs) {
    std::vector<int> out(static_cast<std::size_t>(probs.rows()));
    for (Eigen::Index i = 0; i < probs.rows(); ++i) out[i] = argmax_row(probs.row(i));
    return out;
}

} // namespace

EvaluationReport evaluate(const LabeledDataset& ds, const CnnProbabilityTable& cnn,
                          const RunConfig& cfg) {
    cfg.validate();
    if (cnn.label_names != ds.label_names) {
        throw InputError("BadCnnTable",
                         "CNN table label columns do not match the dataset labels");
    }
    const Split fusion_split = parse_split(cfg.fusion_split);
    const std::vector<int> test_idx = ds.rows_in(Split::test);
    if (test_idx.empty()) throw InputError("EmptySplit", "test split has no rows");
    const std::vector<int> y_test = ds.labels_at(test_idx);
    std::vector<std::string> test_ids;
    for (int i : test_idx) test_ids.push_back(ds.ids[i]);

    const Eigen::MatrixXd cnn_test = cnn.rows_for(test_ids);
    const Eigen::MatrixXd x_test = ds.rows(test_idx);
    const int n_seeds = static_cast<int>(cfg.seeds.size());

    EvaluationReport report;
    report.config = cfg;
    report.label_names = ds.label_names;
    report.seeds = cfg.seeds;
    report.test_size = static_cast<int>(test_idx.size());

    // cnn_alone ignores seeds entirely.
    {
        const std::vector<int> pred = argmax_rows(cnn_test);
        const double wp = weighted_precision(y_test, pred, ds.num_classes());
        report.methods.emplace_back(
            "cnn_alone", summarize(std::vector<double>(n_seeds, wp), true, y_test, pred,
                                   ds.label_names));
    }

    const bool feature_deterministic = classifier_kind_deterministic(cfg.feature_kind);

    // Per-seed feature models (a single shared one when the kind is
    // deterministic). Feature probabilities on the test and fusion splits are
    // cached per seed for reuse across fusion kinds.
    struct SeedState {
        std::unique_ptr<Classifier> model;
        Eigen::MatrixXd test_probs;
    };
    std::vector<SeedState> states(feature_deterministic ? 1 : n_seeds);
    for (std::size_t s = 0; s < states.size(); ++s) {
        const auto start = std::chrono::steady_clock::now();
        states[s].model =
            train_classifier(cfg.feature_kind, ds, Split::train, cfg.hyper, cfg.seeds[s]);
        report.timing.feature_training_minutes += minutes_since(start);
        states[s].test_probs = states[s].model->predict_proba(x_test);
    }
    auto state_for_seed = [&](int s) -> SeedState& {
        return states[feature_deterministic ? 0 : s];
    };

    // features_alone
    {
        std::vector<double> per_seed(n_seeds);
        std::vector<int> first_pred;
        for (int s = 0; s < n_seeds; ++s) {
            const std::vector<int> pred = argmax_rows(state_for_seed(s).test_probs);
            per_seed[s] = weighted_precision(y_test, pred, ds.num_classes());
            if (s == 0) first_pred = pred;
        }
        report.methods.emplace_back(
            "features_alone",
            summarize(std::move(per_seed), feature_deterministic, y_test, first_pred,
                      ds.label_names));
    }

    // fusion methods
    for (const std::string& kind : cfg.fusion_kinds) {
        const bool deterministic =
            feature_deterministic && classifier_kind_deterministic(kind);
        const int runs = deterministic ? 1 : n_seeds;
        std::vector<double> per_seed(n_seeds);
        std::vector<int> first_pred;
        for (int s = 0; s < runs; ++s) {
            SeedState& state = state_for_seed(s);
            const auto start = std::chrono::steady_clock::now();
            const auto fusion_model = train_fusion(kind, cnn, *state.model, ds, fusion_split,
                                                   cfg.hyper, cfg.seeds[s]);
            report.timing.fusion_training_minutes += minutes_since(start);

            Eigen::MatrixXd concat(cnn_test.rows(), cnn_test.cols() + state.test_probs.cols());
            concat << cnn_test, state.test_probs;
            const std::vector<int> pred = fusion_model->predict(concat);
            per_seed[s] = weighted_precision(y_test, pred, ds.num_classes());
            if (s == 0) first_pred = pred;
        }
        if (deterministic) {
            std::fill(per_seed.begin() + 1, per_seed.end(), per_seed[0]);
        }
        report.methods.emplace_back(
            method_name_for_kind(kind),
            summarize(std::move(per_seed), deterministic, y_test, first_pred, ds.label_names));
    }
    return report;
}

// ------------------------------------------------------------- serialization

nlohmann::ordered_json report_to_json(const EvaluationReport& report) {
    nlohmann::ordered_json j;
    j["schema"] = "statfuse-report/1";
    j["config"] = run_config_to_json(report.config);
    j["input_hash"] = report.input_hash;
    j["labels"] = report.label_names;
    j["seeds"] = report.seeds;
    j["test_size"] = report.test_size;
    nlohmann::ordered_json methods;
    for (const auto& [name, r] : report.methods) {
        nlohmann::ordered_json m;
        m["mean_weighted_precision"] = r.mean_weighted_precision;
        m["std_weighted_precision"] = r.std_weighted_precision;
        m["deterministic"] = r.deterministic;
        m["accuracy"] = r.accuracy;
        m["per_seed_weighted_precision"] = r.per_seed_weighted_precision;
        nlohmann::ordered_json per_class = nlohmann::ordered_json::array();
        for (const auto& pc : r.per_class) {
            per_class.push_back({{"label", pc.label},
                                 {"precision", pc.precision},
                                 {"recall", pc.recall},
                                 {"support", pc.support}});
        }
        m["per_class"] = std::move(per_class);
        m["confusion"] = r.confusion;
        methods[name] = std::move(m);
    }
    j["methods"] = std::move(methods);
    return j;
}

nlohmann::ordered_json timing_to_json(const TimingReport& timing) {
    nlohmann::ordered_json j;
    j["schema"] = "statfuse-timing/1";
    j["cnn_training"] = timing.cnn_training;
    j["feature_extraction_minutes"] = timing.feature_extraction_minutes;
    j["feature_training_minutes"] = timing.feature_training_minutes;
    j["fusion_training_minutes"] = timing.fusion_training_minutes;
    return j;
}

std::string report_to_text(const EvaluationReport& report) {
    std::ostringstream out;
    out << "method                weighted_precision   std        accuracy\n";
    out << "-----------------------------------------------------------------\n";
    for (const auto& [name, r] : report.methods) {
        out << std::left << std::setw(22) << name << std::setw(21) << std::fixed
            << std::setprecision(6) << r.mean_weighted_precision << std::setw(11)
            << r.std_weighted_precision << std::setprecision(6) << r.accuracy << "\n";
    }
    out << "\ntest size: " << report.test_size << ", seeds: " << report.seeds.size()
        << ", labels: " << report.label_names.size() << "\n";
    return out.str();
}

} // namespace statfuse
