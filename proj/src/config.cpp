#include "statfuse/config.hpp"
#include "statfuse/error.hpp"
#include "statfuse/io.hpp"

#include <cmath>
#include <set>

namespace statfuse {

namespace {

const std::set<std::string> kClassifierKinds = {"knn", "lda", "logreg", "rf"};
const std::set<std::string> kFusionKinds = {"average", "knn", "lda", "logreg", "rf"};

} // namespace

void RunConfig::validate() const {
    if (glcm_levels < 2 || glcm_levels > 256) {
        throw InputError("BadConfig", "glcm_levels must be in [2, 256]");
    }
    if (resize && resize_side < 2) throw InputError("BadConfig", "resize_side must be >= 2");
    if (!kClassifierKinds.count(feature_kind)) {
        throw InputError("BadConfig", "unknown feature classifier kind: " + feature_kind);
    }
    if (fusion_kinds.empty()) throw InputError("BadConfig", "fusion_kinds must not be empty");
    for (const auto& k : fusion_kinds) {
        if (!kFusionKinds.count(k)) throw InputError("BadConfig", "unknown fusion kind: " + k);
    }
    if (fusion_split != "train" && fusion_split != "valid") {
        throw InputError("BadConfig", "fusion_split must be 'train' or 'valid'");
    }
    if (seeds.empty()) throw InputError("EmptyInput", "seed list must not be empty");
    if (histogram_granularity != "coarse" && histogram_granularity != "per_bin") {
        throw InputError("BadConfig", "histogram_granularity must be 'coarse' or 'per_bin'");
    }
    const double total = split_ratios[0] + split_ratios[1] + split_ratios[2];
    if (std::abs(total - 1.0) > 1e-9) {
        throw InputError("BadConfig", "split_ratios must sum to 1");
    }
    if (hyper.knn_k < 1 || hyper.rf_trees < 1 || hyper.logreg_max_iter < 1 ||
        hyper.logreg_penalty < 0 || hyper.logreg_tol <= 0 || hyper.lda_reg < 0) {
        throw InputError("BadConfig", "hyperparameter out of range");
    }
}

nlohmann::ordered_json run_config_to_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["glcm_levels"] = cfg.glcm_levels;
    j["resize"] = cfg.resize;
    j["resize_side"] = cfg.resize_side;
    j["feature_kind"] = cfg.feature_kind;
    j["hyperparams"] = {{"knn_k", cfg.hyper.knn_k},
                        {"logreg_penalty", cfg.hyper.logreg_penalty},
                        {"logreg_tol", cfg.hyper.logreg_tol},
                        {"logreg_max_iter", cfg.hyper.logreg_max_iter},
                        {"rf_trees", cfg.hyper.rf_trees},
                        {"lda_reg", cfg.hyper.lda_reg}};
    j["fusion_kinds"] = cfg.fusion_kinds;
    j["fusion_split"] = cfg.fusion_split;
    j["seeds"] = cfg.seeds;
    j["histogram_granularity"] = cfg.histogram_granularity;
    j["split_ratios"] = cfg.split_ratios;
    j["split_seed"] = cfg.split_seed;
    j["output_dir"] = cfg.output_dir;
    return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    try {
        cfg.glcm_levels = j.value("glcm_levels", cfg.glcm_levels);
        cfg.resize = j.value("resize", cfg.resize);
        cfg.resize_side = j.value("resize_side", cfg.resize_side);
        cfg.feature_kind = j.value("feature_kind", cfg.feature_kind);
        if (j.contains("hyperparams")) {
            const auto& h = j.at("hyperparams");
            cfg.hyper.knn_k = h.value("knn_k", cfg.hyper.knn_k);
            cfg.hyper.logreg_penalty = h.value("logreg_penalty", cfg.hyper.logreg_penalty);
            cfg.hyper.logreg_tol = h.value("logreg_tol", cfg.hyper.logreg_tol);
            cfg.hyper.logreg_max_iter = h.value("logreg_max_iter", cfg.hyper.logreg_max_iter);
            cfg.hyper.rf_trees = h.value("rf_trees", cfg.hyper.rf_trees);
            cfg.hyper.lda_reg = h.value("lda_reg", cfg.hyper.lda_reg);
        }
        if (j.contains("fusion_kinds")) {
            cfg.fusion_kinds = j.at("fusion_kinds").get<std::vector<std::string>>();
        }
        cfg.fusion_split = j.value("fusion_split", cfg.fusion_split);
        if (j.contains("seeds")) {
            cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        }
        cfg.histogram_granularity =
            j.value("histogram_granularity", cfg.histogram_granularity);
        if (j.contains("split_ratios")) {
            cfg.split_ratios = j.at("split_ratios").get<std::array<double, 3>>();
        }
        cfg.split_seed = j.value("split_seed", cfg.split_seed);
        cfg.output_dir = j.value("output_dir", cfg.output_dir);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("BadConfig", std::string("malformed config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw InputError("BadConfig", std::string("config is not valid JSON: ") + e.what());
    }
    return run_config_from_json(j);
}

} // namespace statfuse
