#include "random_forest.hpp"

#include "json_eigen.hpp"
#include "statfuse/error.hpp"
#include "statfuse/rng.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace statfuse::detail {

namespace {

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    Eigen::VectorXd probs; // leaf class frequencies
};

using Tree = std::vector<TreeNode>;

struct TreeBuilder {
    const Eigen::MatrixXd& x;
    const std::vector<int>& y;
    int num_classes;
    int features_per_split;
    DeterministicRng& rng;
    Tree nodes;

    Eigen::VectorXd class_frequencies(const std::vector<int>& samples) const {
        Eigen::VectorXd freq = Eigen::VectorXd::Zero(num_classes);
        for (int s : samples) freq(y[s]) += 1.0;
        freq /= static_cast<double>(samples.size());
        return freq;
    }

    bool is_pure(const std::vector<int>& samples) const {
        for (std::size_t i = 1; i < samples.size(); ++i) {
            if (y[samples[i]] != y[samples[0]]) return false;
        }
        return true;
    }

    // Sample `features_per_split` distinct feature indices (partial
    // Fisher-Yates over 0..d-1).
    std::vector<int> sample_features() {
        const int d = static_cast<int>(x.cols());
        std::vector<int> pool(d);
        for (int i = 0; i < d; ++i) pool[i] = i;
        const int m = std::min(features_per_split, d);
        for (int i = 0; i < m; ++i) {
            const int j = i + static_cast<int>(rng.next_below(d - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(m);
        return pool;
    }

    int build(std::vector<int> samples) {
        const int node_id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        nodes[node_id].probs = class_frequencies(samples);
        if (samples.size() < 2 || is_pure(samples)) return node_id;

        // Best split by weighted Gini impurity over the candidate features.
        int best_feature = -1;
        double best_threshold = 0.0;
        double best_score = std::numeric_limits<double>::infinity();
        std::vector<std::pair<double, int>> ordered(samples.size());

        for (int f : sample_features()) {
            for (std::size_t i = 0; i < samples.size(); ++i) {
                ordered[i] = {x(samples[i], f), y[samples[i]]};
            }
            std::sort(ordered.begin(), ordered.end());
            if (ordered.front().first == ordered.back().first) continue;

            std::vector<double> left_counts(num_classes, 0.0);
            std::vector<double> right_counts(num_classes, 0.0);
            for (const auto& [value, label] : ordered) right_counts[label] += 1.0;
            const double total = static_cast<double>(ordered.size());

            double n_left = 0.0;
            for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
                left_counts[ordered[i].second] += 1.0;
                right_counts[ordered[i].second] -= 1.0;
                n_left += 1.0;
                if (ordered[i].first == ordered[i + 1].first) continue;

                const double n_right = total - n_left;
                double gini_left = 1.0, gini_right = 1.0;
                for (int c = 0; c < num_classes; ++c) {
                    gini_left -= (left_counts[c] / n_left) * (left_counts[c] / n_left);
                    gini_right -= (right_counts[c] / n_right) * (right_counts[c] / n_right);
                }
                const double score = (n_left * gini_left + n_right * gini_right) / total;
                if (score < best_score) {
                    best_score = score;
                    best_feature = f;
                    best_threshold = 0.5 * (ordered[i].first + ordered[i + 1].first);
                }
            }
        }
        if (best_feature < 0) return node_id; // candidates all constant: leaf

        std::vector<int> left_samples, right_samples;
        for (int s : samples) {
            (x(s, best_feature) <= best_threshold ? left_samples : right_samples).push_back(s);
        }
        if (left_samples.empty() || right_samples.empty()) return node_id;

        samples.clear();
        samples.shrink_to_fit();
        nodes[node_id].feature = best_feature;
        nodes[node_id].threshold = best_threshold;
        const int left_id = build(std::move(left_samples));
        nodes[node_id].left = left_id;
        const int right_id = build(std::move(right_samples));
        nodes[node_id].right = right_id;
        return node_id;
    }
};

Tree train_tree(const Eigen::MatrixXd& x, const std::vector<int>& y, int num_classes,
                int features_per_split, std::uint64_t tree_seed) {
    DeterministicRng rng(tree_seed);
    const int n = static_cast<int>(x.rows());
    std::vector<int> bootstrap(n);
    for (int i = 0; i < n; ++i) bootstrap[i] = static_cast<int>(rng.next_below(n));

    TreeBuilder builder{x, y, num_classes, features_per_split, rng, {}};
    builder.build(std::move(bootstrap));
    return std::move(builder.nodes);
}

class RandomForestClassifier final : public Classifier {
public:
    RandomForestClassifier() = default;

    // Trees are independent given their derived seeds (seed + tree index),
    // so parallel and serial training produce identical forests.
    static std::unique_ptr<RandomForestClassifier> train(const Eigen::MatrixXd& Xs,
                                                         const std::vector<int>& y,
                                                         std::vector<std::string> labels,
                                                         const Hyperparams& hp,
                                                         std::uint64_t seed) {
        auto m = std::make_unique<RandomForestClassifier>();
        m->labels_ = std::move(labels);
        m->seed_ = seed;
        const int num_classes = m->num_classes();
        const int n_trees = hp.rf_trees;
        const int features_per_split =
            static_cast<int>(std::ceil(std::sqrt(static_cast<double>(Xs.cols()))));

        m->trees_.resize(n_trees);
        const unsigned hw = std::thread::hardware_concurrency();
        const int n_workers = std::max(1, std::min<int>(hw ? hw : 1, n_trees));
        auto worker = [&](int w) {
            for (int t = w; t < n_trees; t += n_workers) {
                m->trees_[t] = train_tree(Xs, y, num_classes, features_per_split, seed + t);
            }
        };
        if (n_workers == 1) {
            worker(0);
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker, w);
            for (auto& th : pool) th.join();
        }
        return m;
    }

    std::string kind() const override { return "rf"; }

    Eigen::MatrixXd predict_standardized(const Eigen::MatrixXd& Xs) const override {
        Eigen::MatrixXd probs = Eigen::MatrixXd::Zero(Xs.rows(), num_classes());
        for (Eigen::Index i = 0; i < Xs.rows(); ++i) {
            for (const Tree& tree : trees_) {
                int node = 0;
                while (tree[node].feature >= 0) {
                    node = Xs(i, tree[node].feature) <= tree[node].threshold
                               ? tree[node].left
                               : tree[node].right;
                }
                probs.row(i) += tree[node].probs;
            }
            probs.row(i) /= static_cast<double>(trees_.size());
        }
        return probs;
    }

    nlohmann::ordered_json params_to_json() const override {
        nlohmann::ordered_json trees = nlohmann::ordered_json::array();
        for (const Tree& tree : trees_) {
            nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
            for (const TreeNode& n : tree) {
                nodes.push_back({{"f", n.feature},
                                 {"t", n.threshold},
                                 {"l", n.left},
                                 {"r", n.right},
                                 {"p", vector_to_json(n.probs)}});
            }
            trees.push_back(std::move(nodes));
        }
        return {{"trees", std::move(trees)}};
    }

    static std::unique_ptr<RandomForestClassifier> from_json(const nlohmann::json& params) {
        auto m = std::make_unique<RandomForestClassifier>();
        for (const auto& tree_json : params.at("trees")) {
            Tree tree;
            for (const auto& node_json : tree_json) {
                TreeNode n;
                n.feature = node_json.at("f").get<int>();
                n.threshold = node_json.at("t").get<double>();
                n.left = node_json.at("l").get<int>();
                n.right = node_json.at("r").get<int>();
                n.probs = vector_from_json(node_json.at("p"));
                tree.push_back(std::move(n));
            }
            m->trees_.push_back(std::move(tree));
        }
        return m;
    }

private:
    std::vector<Tree> trees_;
};

} // namespace

std::unique_ptr<Classifier> train_random_forest(const Eigen::MatrixXd& Xs,
                                                const std::vector<int>& y,
                                                std::vector<std::string> labels,
                                                const Hyperparams& hp, std::uint64_t seed) {
    return RandomForestClassifier::train(Xs, y, std::move(labels), hp, seed);
}

std::unique_ptr<Classifier> random_forest_from_json(const nlohmann::json& params) {
    return RandomForestClassifier::from_json(params);
}

} // namespace statfuse::detail
