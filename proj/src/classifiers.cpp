#include "statfuse/classifiers.hpp"
#include "statfuse/error.hpp"
#include "statfuse/io.hpp"

#include "json_eigen.hpp"
#include "optim.hpp"
#include "random_forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace statfuse {

using detail::matrix_from_json;
using detail::matrix_to_json;
using detail::vector_from_json;
using detail::vector_to_json;

int argmax_row(const Eigen::RowVectorXd& row) {
    int best = 0;
    for (Eigen::Index i = 1; i < row.size(); ++i) {
        if (row(i) > row(best)) best = static_cast<int>(i);
    }
    return best;
}

// ---------------------------------------------------------------- Standardizer

Standardizer Standardizer::fit(const Eigen::MatrixXd& X_train) {
    if (X_train.rows() == 0) throw InputError("EmptySplit", "cannot fit standardizer on 0 rows");
    const Eigen::Index d = X_train.cols();
    Standardizer s;
    s.mean = X_train.colwise().mean();
    s.scale.resize(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const double var =
            (X_train.col(j).array() - s.mean(j)).square().sum() / X_train.rows();
        const double sd = std::sqrt(var);
        s.scale(j) = sd > 0.0 ? sd : 1.0; // zero-variance features pass through centered
    }
    return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& X) const {
    if (X.cols() != mean.size()) {
        throw InputError("DimensionMismatch",
                         "expected " + std::to_string(mean.size()) + " features, got " +
                             std::to_string(X.cols()));
    }
    return (X.rowwise() - mean.transpose()).array().rowwise() /
           scale.transpose().array();
}

nlohmann::ordered_json Standardizer::to_json() const {
    return {{"mean", vector_to_json(mean)}, {"scale", vector_to_json(scale)}};
}

Standardizer Standardizer::from_json(const nlohmann::json& j) {
    Standardizer s;
    s.mean = vector_from_json(j.at("mean"));
    s.scale = vector_from_json(j.at("scale"));
    return s;
}

// ------------------------------------------------------------ Classifier base

Eigen::MatrixXd Classifier::predict_proba(const Eigen::MatrixXd& X) const {
    if (X.cols() != dims_) {
        throw InputError("DimensionMismatch",
                         "model expects " + std::to_string(dims_) + " features, got " +
                             std::to_string(X.cols()));
    }
    if (!X.allFinite()) throw NumericError("NonFiniteFeature", "input contains NaN or inf");
    return predict_standardized(standardizer_.apply(X));
}

std::vector<int> Classifier::predict(const Eigen::MatrixXd& X) const {
    const Eigen::MatrixXd probs = predict_proba(X);
    std::vector<int> out(static_cast<std::size_t>(probs.rows()));
    for (Eigen::Index i = 0; i < probs.rows(); ++i) out[i] = argmax_row(probs.row(i));
    return out;
}

nlohmann::ordered_json Classifier::to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = "statfuse-model/1";
    j["kind"] = kind();
    j["labels"] = labels_;
    j["seed"] = seed_;
    j["dims"] = dims_;
    j["standardizer"] = standardizer_.to_json();
    j["params"] = params_to_json();
    return j;
}

namespace {

Eigen::MatrixXd softmax_rows(Eigen::MatrixXd scores) {
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        const double m = scores.row(i).maxCoeff();
        scores.row(i) = (scores.row(i).array() - m).exp();
        scores.row(i) /= scores.row(i).sum();
    }
    return scores;
}

// ----------------------------------------------------------------------- KNN

class KnnClassifier final : public Classifier {
public:
    KnnClassifier() = default;

    static std::unique_ptr<KnnClassifier> train(const Eigen::MatrixXd& Xs,
                                                const std::vector<int>& y,
                                                std::vector<std::string> labels, int k,
                                                std::uint64_t seed) {
        auto m = std::make_unique<KnnClassifier>();
        m->labels_ = std::move(labels);
        m->seed_ = seed;
        m->k_ = k;
        m->train_x_ = Xs;
        m->train_y_ = y;
        return m;
    }

    std::string kind() const override { return "knn"; }

    Eigen::MatrixXd predict_standardized(const Eigen::MatrixXd& Xs) const override {
        const int n_train = static_cast<int>(train_x_.rows());
        const int k_eff = std::min(k_, n_train);
        Eigen::MatrixXd probs = Eigen::MatrixXd::Zero(Xs.rows(), num_classes());
        std::vector<std::pair<double, int>> dist(n_train);
        for (Eigen::Index i = 0; i < Xs.rows(); ++i) {
            for (int t = 0; t < n_train; ++t) {
                dist[t] = {(train_x_.row(t) - Xs.row(i)).squaredNorm(), t};
            }
            // sort on (distance, row index): equal distances break to lower index
            std::partial_sort(dist.begin(), dist.begin() + k_eff, dist.end());
            for (int t = 0; t < k_eff; ++t) {
                probs(i, train_y_[dist[t].second]) += 1.0;
            }
            probs.row(i) /= static_cast<double>(k_eff);
        }
        return probs;
    }

    nlohmann::ordered_json params_to_json() const override {
        return {{"k", k_}, {"train_x", matrix_to_json(train_x_)}, {"train_y", train_y_}};
    }

    static std::unique_ptr<KnnClassifier> from_json(const nlohmann::json& params) {
        auto m = std::make_unique<KnnClassifier>();
        m->k_ = params.at("k").get<int>();
        m->train_x_ = matrix_from_json(params.at("train_x"));
        m->train_y_ = params.at("train_y").get<std::vector<int>>();
        return m;
    }

private:
    int k_ = 5;
    Eigen::MatrixXd train_x_;
    std::vector<int> train_y_;
};

// ----------------------------------------------------------------------- LDA

class LdaClassifier final : public Classifier {
public:
    LdaClassifier() = default;

    static std::unique_ptr<LdaClassifier> train(const Eigen::MatrixXd& Xs,
                                                const std::vector<int>& y,
                                                std::vector<std::string> labels,
                                                double reg_factor, std::uint64_t seed) {
        auto m = std::make_unique<LdaClassifier>();
        m->labels_ = std::move(labels);
        m->seed_ = seed;
        const Eigen::Index n = Xs.rows();
        const Eigen::Index d = Xs.cols();
        const int k = m->num_classes();

        m->means_ = Eigen::MatrixXd::Zero(k, d);
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
        for (Eigen::Index i = 0; i < n; ++i) {
            m->means_.row(y[i]) += Xs.row(i);
            counts(y[i]) += 1.0;
        }
        for (int c = 0; c < k; ++c) {
            if (counts(c) > 0) m->means_.row(c) /= counts(c);
        }

        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::RowVectorXd dev = Xs.row(i) - m->means_.row(y[i]);
            cov.noalias() += dev.transpose() * dev;
        }
        cov /= static_cast<double>(n);

        const double trace = cov.trace();
        if (trace > 0.0) {
            cov += (reg_factor * trace / static_cast<double>(d)) *
                   Eigen::MatrixXd::Identity(d, d);
        } else {
            cov = Eigen::MatrixXd::Identity(d, d);
        }
        m->precision_ = cov.ldlt().solve(Eigen::MatrixXd::Identity(d, d));

        m->log_priors_.resize(k);
        for (int c = 0; c < k; ++c) {
            m->log_priors_(c) = counts(c) > 0 ? std::log(counts(c) / static_cast<double>(n))
                                              : -std::numeric_limits<double>::infinity();
        }
        return m;
    }

    std::string kind() const override { return "lda"; }

    Eigen::MatrixXd predict_standardized(const Eigen::MatrixXd& Xs) const override {
        Eigen::MatrixXd scores(Xs.rows(), num_classes());
        for (Eigen::Index i = 0; i < Xs.rows(); ++i) {
            for (int c = 0; c < num_classes(); ++c) {
                const Eigen::VectorXd dev = (Xs.row(i) - means_.row(c)).transpose();
                scores(i, c) = log_priors_(c) - 0.5 * dev.dot(precision_ * dev);
            }
        }
        return softmax_rows(std::move(scores));
    }

    nlohmann::ordered_json params_to_json() const override {
        return {{"means", matrix_to_json(means_)},
                {"precision", matrix_to_json(precision_)},
                {"log_priors", vector_to_json(log_priors_)}};
    }

    static std::unique_ptr<LdaClassifier> from_json(const nlohmann::json& params) {
        auto m = std::make_unique<LdaClassifier>();
        m->means_ = matrix_from_json(params.at("means"));
        m->precision_ = matrix_from_json(params.at("precision"));
        m->log_priors_ = vector_from_json(params.at("log_priors"));
        return m;
    }

private:
    Eigen::MatrixXd means_;     // K x d class means
    Eigen::MatrixXd precision_; // inverse of the regularized pooled covariance
    Eigen::VectorXd log_priors_;
};

// ------------------------------------------------------ multinomial logistic

class LogRegClassifier final : public Classifier {
public:
    LogRegClassifier() = default;

    static std::unique_ptr<LogRegClassifier> train(const Eigen::MatrixXd& Xs,
                                                   const std::vector<int>& y,
                                                   std::vector<std::string> labels,
                                                   const Hyperparams& hp, std::uint64_t seed) {
        auto m = std::make_unique<LogRegClassifier>();
        m->labels_ = std::move(labels);
        m->seed_ = seed;
        const Eigen::Index n = Xs.rows();
        const Eigen::Index d = Xs.cols();
        const int k = m->num_classes();
        const double penalty = hp.logreg_penalty;

        // Parameter layout: W (k x d), then bias (k); W and its gradient map
        // the same storage order. The bias is not penalized.
        auto objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
            Eigen::Map<const Eigen::MatrixXd> w(theta.data(), k, d);
            Eigen::Map<const Eigen::VectorXd> bias(theta.data() + k * d, k);
            grad.setZero(theta.size());
            Eigen::Map<Eigen::MatrixXd> gw(grad.data(), k, d);
            Eigen::Map<Eigen::VectorXd> gb(grad.data() + k * d, k);

            double loss = 0.0;
            Eigen::MatrixXd scores = Xs * w.transpose();
            scores.rowwise() += bias.transpose();
            for (Eigen::Index i = 0; i < n; ++i) {
                const double mx = scores.row(i).maxCoeff();
                const Eigen::RowVectorXd ex = (scores.row(i).array() - mx).exp();
                const double denom = ex.sum();
                loss += std::log(denom) + mx - scores(i, y[i]);
                Eigen::RowVectorXd p = ex / denom;
                p(y[i]) -= 1.0;
                gw.noalias() += p.transpose() * Xs.row(i);
                gb += p.transpose();
            }
            loss += 0.5 * penalty * w.squaredNorm();
            gw += penalty * w;
            return loss;
        };

        const auto result = detail::lbfgs_minimize(
            objective, Eigen::VectorXd::Zero(k * d + k), hp.logreg_tol, hp.logreg_max_iter);
        if (!result.x.allFinite()) {
            throw NumericError("NonFiniteObjective", "logistic regression diverged");
        }
        m->weights_ = Eigen::Map<const Eigen::MatrixXd>(result.x.data(), k, d);
        m->bias_ = result.x.tail(k);
        return m;
    }

    std::string kind() const override { return "logreg"; }

    Eigen::MatrixXd predict_standardized(const Eigen::MatrixXd& Xs) const override {
        Eigen::MatrixXd scores = Xs * weights_.transpose();
        scores.rowwise() += bias_.transpose();
        return softmax_rows(std::move(scores));
    }

    nlohmann::ordered_json params_to_json() const override {
        return {{"weights", matrix_to_json(weights_)}, {"bias", vector_to_json(bias_)}};
    }

    static std::unique_ptr<LogRegClassifier> from_json(const nlohmann::json& params) {
        auto m = std::make_unique<LogRegClassifier>();
        m->weights_ = matrix_from_json(params.at("weights"));
        m->bias_ = vector_from_json(params.at("bias"));
        return m;
    }

private:
    Eigen::MatrixXd weights_; // K x d
    Eigen::VectorXd bias_;    // K
};

// ------------------------------------------------------------ average fuser

// Untrained probability averaging over a concatenated [cnn | features]
// vector; kept behind the Classifier interface so the fusion stage can
// treat it like any other kind.
class AverageFuser final : public Classifier {
public:
    AverageFuser() = default;

    static std::unique_ptr<AverageFuser> make(std::vector<std::string> labels,
                                              Eigen::Index dims, std::uint64_t seed) {
        auto m = std::make_unique<AverageFuser>();
        const int k = static_cast<int>(labels.size());
        if (dims != 2 * k) {
            throw InputError("DimensionMismatch",
                             "average fusion expects 2K concatenated probabilities");
        }
        m->labels_ = std::move(labels);
        m->seed_ = seed;
        return m;
    }

    std::string kind() const override { return "average"; }

    Eigen::MatrixXd predict_standardized(const Eigen::MatrixXd& Xs) const override {
        const int k = num_classes();
        return 0.5 * (Xs.leftCols(k) + Xs.rightCols(k));
    }

    nlohmann::ordered_json params_to_json() const override {
        return nlohmann::ordered_json::object();
    }

private:
};

} // namespace

// -------------------------------------------------------------------- factory

bool classifier_kind_deterministic(const std::string& kind) {
    return kind != "rf";
}

std::unique_ptr<Classifier> train_classifier(const std::string& kind, const Eigen::MatrixXd& X,
                                             const std::vector<int>& y,
                                             std::vector<std::string> label_names,
                                             const Hyperparams& hp, std::uint64_t seed) {
    if (X.rows() == 0) throw InputError("EmptySplit", "training split is empty");
    if (static_cast<std::size_t>(X.rows()) != y.size()) {
        throw InputError("DimensionMismatch", "X and y row counts differ");
    }
    if (!X.allFinite()) throw NumericError("NonFiniteFeature", "training data contains NaN or inf");
    const int k = static_cast<int>(label_names.size());
    std::set<int> present;
    for (int label : y) {
        if (label < 0 || label >= k) {
            throw InputError("BadLabel", "class index out of range: " + std::to_string(label));
        }
        present.insert(label);
    }
    if (present.size() < 2) {
        throw InputError("SingleClassSplit", "training split must contain at least 2 classes");
    }

    std::unique_ptr<Classifier> model;
    if (kind == "average") {
        model = AverageFuser::make(std::move(label_names), X.cols(), seed);
        // identity standardization: averaging operates on raw probabilities
        model->standardizer_.mean = Eigen::VectorXd::Zero(X.cols());
        model->standardizer_.scale = Eigen::VectorXd::Ones(X.cols());
        model->dims_ = X.cols();
        return model;
    }

    const Standardizer standardizer = Standardizer::fit(X);
    const Eigen::MatrixXd Xs = standardizer.apply(X);
    if (kind == "knn") {
        model = KnnClassifier::train(Xs, y, std::move(label_names), hp.knn_k, seed);
    } else if (kind == "lda") {
        model = LdaClassifier::train(Xs, y, std::move(label_names), hp.lda_reg, seed);
    } else if (kind == "logreg") {
        model = LogRegClassifier::train(Xs, y, std::move(label_names), hp, seed);
    } else if (kind == "rf") {
        model = detail::train_random_forest(Xs, y, std::move(label_names), hp, seed);
    } else {
        throw InputError("BadConfig", "unknown classifier kind: " + kind);
    }
    model->standardizer_ = standardizer;
    model->dims_ = X.cols();
    return model;
}

std::unique_ptr<Classifier> train_classifier(const std::string& kind, const LabeledDataset& ds,
                                             Split split, const Hyperparams& hp,
                                             std::uint64_t seed) {
    const std::vector<int> idx = ds.rows_in(split);
    return train_classifier(kind, ds.rows(idx), ds.labels_at(idx), ds.label_names, hp, seed);
}

std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema").get<std::string>() != "statfuse-model/1") {
            throw InputError("BadModelFile", "unknown model schema");
        }
        const std::string kind = j.at("kind").get<std::string>();
        const auto& params = j.at("params");
        std::unique_ptr<Classifier> model;
        if (kind == "knn") {
            model = KnnClassifier::from_json(params);
        } else if (kind == "lda") {
            model = LdaClassifier::from_json(params);
        } else if (kind == "logreg") {
            model = LogRegClassifier::from_json(params);
        } else if (kind == "rf") {
            model = detail::random_forest_from_json(params);
        } else if (kind == "average") {
            model = std::make_unique<AverageFuser>();
        } else {
            throw InputError("BadModelFile", "unknown classifier kind: " + kind);
        }
        model->labels_ = j.at("labels").get<std::vector<std::string>>();
        model->seed_ = j.at("seed").get<std::uint64_t>();
        model->dims_ = j.at("dims").get<Eigen::Index>();
        model->standardizer_ = Standardizer::from_json(j.at("standardizer"));
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("BadModelFile", std::string("malformed model document: ") + e.what());
    }
}

void save_classifier(const Classifier& model, const std::string& path) {
    atomic_write_file(path, model.to_json().dump(2) + "\n");
}

std::unique_ptr<Classifier> load_classifier(const std::string& path) {
    try {
        return classifier_from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw InputError("BadModelFile", std::string("model file is not valid JSON: ") + e.what());
    }
}

} // namespace statfuse
