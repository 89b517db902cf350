#ifndef STATFUSE_FUSION_HPP
#define STATFUSE_FUSION_HPP

#include "statfuse/classifiers.hpp"
#include "statfuse/config.hpp"
#include "statfuse/dataset.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace statfuse {

/// Externally supplied CNN class probabilities, one row per image id.
/// Rows are validated (sum within 1e-4 of 1, no negative entries) and
/// renormalized on ingestion; column names must match the dataset's label
/// dictionary exactly.
struct CnnProbabilityTable {
    std::vector<std::string> label_names;
    std::map<std::string, Eigen::VectorXd> rows;
    std::string provenance;

    int num_classes() const { return static_cast<int>(label_names.size()); }

    /// Rows for the given ids in order; throws MissingProbabilities naming
    /// the absent ids.
    Eigen::MatrixXd rows_for(const std::vector<std::string>& ids) const;
};

CnnProbabilityTable make_cnn_table(std::vector<std::string> label_names,
                                   std::vector<std::pair<std::string, Eigen::VectorXd>> rows,
                                   std::string provenance);

/// CSV schema: "image_id,<label_0>,...,<label_{K-1}>".
CnnProbabilityTable load_cnn_table(const std::string& path,
                                   const std::vector<std::string>& expected_labels = {});
void save_cnn_table(const CnnProbabilityTable& table, const std::string& path);

/// Elementwise mean of two probability vectors of equal length.
Eigen::VectorXd fuse_average(const Eigen::VectorXd& p_cnn, const Eigen::VectorXd& p_feat);

/// Support-weighted mean of per-class precision; a class that is never
/// predicted contributes precision 0.
double weighted_precision(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                          int num_classes);

std::vector<std::vector<int>> confusion_matrix(const std::vector<int>& y_true,
                                               const std::vector<int>& y_pred, int num_classes);

/// Train a fusion classifier of the given kind on concatenated
/// [cnn probabilities | feature-classifier probabilities] over fusion_split.
std::unique_ptr<Classifier> train_fusion(const std::string& kind,
                                         const CnnProbabilityTable& cnn,
                                         const Classifier& feature_model,
                                         const LabeledDataset& ds, Split fusion_split,
                                         const Hyperparams& hp, std::uint64_t seed);

struct PerClassMetrics {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    int support = 0;
};

struct MethodResult {
    double mean_weighted_precision = 0.0;
    double std_weighted_precision = 0.0;
    bool deterministic = false;
    double accuracy = 0.0; // first seed
    std::vector<double> per_seed_weighted_precision;
    std::vector<PerClassMetrics> per_class; // first seed
    std::vector<std::vector<int>> confusion; // first seed
};

struct TimingReport {
    double feature_extraction_minutes = 0.0;
    double feature_training_minutes = 0.0;
    double fusion_training_minutes = 0.0;
    std::string cnn_training = "external/ingested";
};

struct EvaluationReport {
    RunConfig config;
    std::string input_hash;
    std::vector<std::string> label_names;
    std::vector<std::uint64_t> seeds;
    int test_size = 0;
    std::vector<std::pair<std::string, MethodResult>> methods; // canonical order
    TimingReport timing;

    const MethodResult* find(const std::string& method) const;
};

/// Run the full evaluation protocol: cnn_alone, features_alone and every
/// configured fusion kind, each scored by weighted precision on the test
/// split for every seed. Deterministic methods are computed once and report
/// a standard deviation of exactly 0. Wall-clock training times accumulate
/// into the timing block; the report body is a pure function of
/// (dataset, table, config).
EvaluationReport evaluate(const LabeledDataset& ds, const CnnProbabilityTable& cnn,
                          const RunConfig& cfg);

/// Report body; timings are emitted separately so that repeated runs stay
/// byte-identical.
nlohmann::ordered_json report_to_json(const EvaluationReport& report);
nlohmann::ordered_json timing_to_json(const TimingReport& timing);
std::string report_to_text(const EvaluationReport& report);

std::string method_name_for_kind(const std::string& fusion_kind);

} // namespace statfuse

#endif
