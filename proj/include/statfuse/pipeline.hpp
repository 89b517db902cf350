#ifndef STATFUSE_PIPELINE_HPP
#define STATFUSE_PIPELINE_HPP

#include "statfuse/ablation.hpp"
#include "statfuse/config.hpp"
#include "statfuse/dataset.hpp"
#include "statfuse/fusion.hpp"

#include <iosfwd>
#include <string>

namespace statfuse {

/// Extract the indicator vectors for every manifest entry. Relative image
/// paths resolve against the manifest's directory. Images are processed
/// concurrently; the output order is the manifest order regardless of
/// scheduling.
struct ExtractionResult {
    FeatureTable table;
    double minutes = 0.0;
};
ExtractionResult extract_features(const DatasetManifest& manifest, const std::string& base_dir,
                                  const RunConfig& cfg);

struct ExtractOptions {
    std::string manifest_path;
    std::string config_path; // empty: defaults
    std::string out_path;
    bool no_resize = false; // overrides the config's resize switch
};
void run_extract(const ExtractOptions& opt, std::ostream& log);

struct TrainFeaturesOptions {
    std::string features_path;
    std::string manifest_path; // empty: auto-split over the feature rows
    std::string config_path;
    std::string out_path;
};
void run_train_features(const TrainFeaturesOptions& opt, std::ostream& log);

struct FuseOptions {
    std::string features_path;
    std::string manifest_path; // empty: auto-split over the feature rows
    std::string cnn_path;
    std::string config_path;
    std::string out_path;
};
void run_fuse(const FuseOptions& opt, std::ostream& log);

struct EvaluateOptions {
    std::string manifest_path;
    std::string features_path; // empty: extract in-process (timed)
    std::string cnn_path;
    std::string config_path;
    std::string report_path;
    std::string timing_path; // empty: "<report_path>.timing.json"
    bool no_resize = false;
};
EvaluationReport run_evaluate(const EvaluateOptions& opt, std::ostream& log);

struct AblateOptions {
    std::string manifest_path;
    std::string features_path; // empty: extract in-process
    std::string cnn_path;
    std::string config_path;
    std::string out_path;
    bool no_resize = false;
};
AblationResult run_ablate(const AblateOptions& opt, std::ostream& log);

struct SynthOptions {
    std::string spec_path; // empty: defaults
    std::string out_dir;
};
void run_synth(const SynthOptions& opt, std::ostream& log);

/// Persisted fusion bundle: the feature classifier plus one fusion
/// classifier per configured kind, sharing a label map.
struct FusionModelBundle {
    std::vector<std::string> label_names;
    std::unique_ptr<Classifier> feature_model;
    std::vector<std::pair<std::string, std::unique_ptr<Classifier>>> fusion_models;
};
void save_fusion_bundle(const FusionModelBundle& bundle, const std::string& path);
FusionModelBundle load_fusion_bundle(const std::string& path);

/// Manifest with splits guaranteed: loads, then auto-splits when the split
/// column is absent.
DatasetManifest prepare_manifest(const std::string& path, const RunConfig& cfg);

} // namespace statfuse

#endif
