#ifndef STATFUSE_CONFIG_HPP
#define STATFUSE_CONFIG_HPP

#include <json.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace statfuse {

struct Hyperparams {
    int knn_k = 5;
    double logreg_penalty = 1.0; // L2 strength on weights
    double logreg_tol = 1e-6;    // max abs gradient at convergence
    int logreg_max_iter = 1000;
    int rf_trees = 500;
    double lda_reg = 1e-6; // lambda = lda_reg * trace(cov) / d
};

/// Full run configuration. Serialized alongside every report so a run can
/// be reproduced from the report alone.
struct RunConfig {
    int glcm_levels = 32;
    bool resize = true;
    int resize_side = 224;
    std::string feature_kind = "rf";
    Hyperparams hyper;
    std::vector<std::string> fusion_kinds = {"average", "knn", "lda", "logreg", "rf"};
    std::string fusion_split = "train"; // "train" or "valid"
    // Forest tree seeds derive as seed + tree_index; spacing the default
    // list keeps the 10 executions' forests disjoint.
    std::vector<std::uint64_t> seeds = {1,      100001, 200001, 300001, 400001,
                                        500001, 600001, 700001, 800001, 900001};
    std::string histogram_granularity = "coarse"; // "coarse" or "per_bin"
    std::array<double, 3> split_ratios = {0.7, 0.1, 0.2};
    std::uint64_t split_seed = 1;
    std::string output_dir = ".";

    void validate() const;
};

nlohmann::ordered_json run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);

/// Load a config file; missing fields keep their documented defaults.
RunConfig load_run_config(const std::string& path);

} // namespace statfuse

#endif
