#ifndef STATFUSE_CLASSIFIERS_HPP
#define STATFUSE_CLASSIFIERS_HPP

#include "statfuse/config.hpp"
#include "statfuse/dataset.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <memory>
#include <string>
#include <vector>

namespace statfuse {

/// Per-feature z-scoring fitted on the training split. Features whose
/// training standard deviation is zero are centered but not scaled.
struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;

    static Standardizer fit(const Eigen::MatrixXd& X_train);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;

    nlohmann::ordered_json to_json() const;
    static Standardizer from_json(const nlohmann::json& j);
};

/// Trained probabilistic classifier. predict_proba returns one row per
/// input, each a non-negative vector summing to 1; predict takes the argmax
/// with ties resolved toward the lower class index.
class Classifier {
public:
    virtual ~Classifier() = default;

    virtual std::string kind() const = 0;
    const std::vector<std::string>& labels() const { return labels_; }
    int num_classes() const { return static_cast<int>(labels_.size()); }
    std::uint64_t seed() const { return seed_; }

    Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& X) const;
    std::vector<int> predict(const Eigen::MatrixXd& X) const;

    nlohmann::ordered_json to_json() const;

protected:
    virtual Eigen::MatrixXd predict_standardized(const Eigen::MatrixXd& Xs) const = 0;
    virtual nlohmann::ordered_json params_to_json() const = 0;

    std::vector<std::string> labels_;
    Standardizer standardizer_;
    std::uint64_t seed_ = 0;
    Eigen::Index dims_ = 0;

    friend std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json& j);
    friend std::unique_ptr<Classifier> train_classifier(const std::string& kind,
                                                        const Eigen::MatrixXd& X,
                                                        const std::vector<int>& y,
                                                        std::vector<std::string> label_names,
                                                        const Hyperparams& hp,
                                                        std::uint64_t seed);
};

/// Train one of {knn, lda, logreg, rf, average} on explicit rows. "average"
/// is the untrained probability-averaging fuser; it requires the input width
/// to be exactly twice the class count.
std::unique_ptr<Classifier> train_classifier(const std::string& kind, const Eigen::MatrixXd& X,
                                             const std::vector<int>& y,
                                             std::vector<std::string> label_names,
                                             const Hyperparams& hp, std::uint64_t seed);

/// Convenience: train on the dataset rows tagged with `split`.
std::unique_ptr<Classifier> train_classifier(const std::string& kind, const LabeledDataset& ds,
                                             Split split, const Hyperparams& hp,
                                             std::uint64_t seed);

bool classifier_kind_deterministic(const std::string& kind);

std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json& j);
void save_classifier(const Classifier& model, const std::string& path);
std::unique_ptr<Classifier> load_classifier(const std::string& path);

/// Column argmax with the lower-index tie rule.
int argmax_row(const Eigen::RowVectorXd& row);

} // namespace statfuse

#endif
