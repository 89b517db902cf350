#ifndef STATFUSE_SYNTH_HPP
#define STATFUSE_SYNTH_HPP

#include "statfuse/dataset.hpp"
#include "statfuse/fusion.hpp"
#include "statfuse/image.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace statfuse {

/// Procedural dataset with controlled class-conditional color and texture
/// statistics plus a synthetic CNN probability table. The *_separation knobs
/// set how far apart class signatures lie (0 removes the signal entirely);
/// the *_fidelity knobs set the fraction of images that carry their own
/// class signature, which caps what a feature classifier can reach. CNN
/// accuracy and the fidelities are realized by quota inside every
/// (class, split) group, so the designed rates hold exactly per split.
struct SynthSpec {
    int num_classes = 2;
    int n_per_class = 100;
    int image_side = 32;
    double color_separation = 1.0;
    double color_fidelity = 1.0;
    double texture_separation = 1.0;
    double texture_fidelity = 1.0;
    double noise_sigma = 8.0;
    std::vector<double> cnn_accuracy; // per class; empty means perfect oracle
    std::uint64_t seed = 1;
    std::array<double, 3> split_ratios = {0.7, 0.1, 0.2};
};

struct SynthDataset {
    std::vector<ImageRgb> images; // aligned with manifest entries
    DatasetManifest manifest;     // with splits assigned
    CnnProbabilityTable cnn;
};

SynthDataset generate_synthetic(const SynthSpec& spec);

/// Write images/ *.png, manifest.csv and cnn_probs.csv under dir.
void save_synth_dataset(const SynthDataset& data, const std::string& dir);

/// Feature-space fixture: a ready LabeledDataset whose class signal lives
/// only in the named indicator families; every other column is
/// class-independent noise. Used by the ablation protocol tests.
struct FeatureSynthSpec {
    int num_classes = 2;
    int n_per_class = 100;
    std::vector<std::string> informative_families = {"tex_contrast"};
    double class_separation = 3.0;
    double noise_sigma = 1.0;
    std::uint64_t seed = 1;
    std::array<double, 3> split_ratios = {0.7, 0.1, 0.2};
};

LabeledDataset synthetic_feature_dataset(const FeatureSynthSpec& spec);

/// Synthetic CNN table over all dataset ids with the given per-class argmax
/// accuracy.
CnnProbabilityTable synthetic_cnn_table(const LabeledDataset& ds,
                                        const std::vector<double>& accuracy_per_class,
                                        std::uint64_t seed);

} // namespace statfuse

#endif
