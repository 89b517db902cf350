#ifndef STATFUSE_DATASET_HPP
#define STATFUSE_DATASET_HPP

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace statfuse {

enum class Split { train, valid, test };

std::string split_name(Split s);
Split parse_split(const std::string& name);

struct ManifestEntry {
    std::string image_id;
    std::string path;
    std::string label;
    std::optional<Split> split;
};

/// Dataset manifest: one row per image, labels collected in first-seen
/// order. The split column is optional; auto_split fills it in.
struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::vector<std::string> label_names;

    bool has_splits() const;
    int label_index(const std::string& label) const;
};

DatasetManifest make_manifest(std::vector<ManifestEntry> entries);

/// CSV schema: "image_id,path,label[,split]".
DatasetManifest load_manifest(const std::string& path);
void save_manifest(const DatasetManifest& manifest, const std::string& path);

/// Stratified split, deterministic for a fixed seed. Test and valid sizes
/// are floor(n_label * ratio) but at least 1 whenever the ratio is positive;
/// the remainder goes to train.
DatasetManifest auto_split(const DatasetManifest& manifest, std::array<double, 3> ratios,
                           std::uint64_t seed);

/// Feature rows keyed by image id, as written to / read from features CSV
/// ("image_id,label,<54 canonical names>").
struct FeatureTable {
    std::vector<std::string> ids;
    std::vector<std::string> labels;
    std::vector<std::string> feature_names;
    Eigen::MatrixXd X;
};

FeatureTable load_features_csv(const std::string& path);
std::string features_csv_to_string(const FeatureTable& table);
void save_features_csv(const FeatureTable& table, const std::string& path);

struct LabeledDataset {
    Eigen::MatrixXd X;                    // n x d
    std::vector<int> y;                   // class indices in [0, K)
    std::vector<std::string> label_names; // K
    std::vector<Split> split;             // per row
    std::vector<std::string> ids;         // per row
    std::vector<std::string> feature_names;

    int num_classes() const { return static_cast<int>(label_names.size()); }
    std::vector<int> rows_in(Split s) const;
    Eigen::MatrixXd rows(const std::vector<int>& idx) const;
    std::vector<int> labels_at(const std::vector<int>& idx) const;
    /// Copy with a subset of feature columns (used by the ablation driver).
    LabeledDataset with_columns(const std::vector<int>& columns) const;
};

/// Join manifest splits/labels with extracted features by image id. Every
/// manifest row must have a feature row; labels must agree.
LabeledDataset join_dataset(const DatasetManifest& manifest, const FeatureTable& features);

} // namespace statfuse

#endif
