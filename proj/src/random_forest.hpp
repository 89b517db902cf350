#ifndef STATFUSE_SRC_RANDOM_FOREST_HPP
#define STATFUSE_SRC_RANDOM_FOREST_HPP

#include "statfuse/classifiers.hpp"

namespace statfuse::detail {

std::unique_ptr<Classifier> train_random_forest(const Eigen::MatrixXd& Xs,
                                                const std::vector<int>& y,
                                                std::vector<std::string> labels,
                                                const Hyperparams& hp, std::uint64_t seed);

std::unique_ptr<Classifier> random_forest_from_json(const nlohmann::json& params);

} // namespace statfuse::detail

#endif
