#include "statfuse/synth.hpp"
#include "statfuse/ablation.hpp"
#include "statfuse/error.hpp"
#include "statfuse/indicators.hpp"
#include "statfuse/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

namespace statfuse {

namespace {

void check_unit(double v, const char* what) {
    if (v < 0.0 || v > 1.0) {
        throw InputError("BadSpec", std::string(what) + " must be in [0, 1]");
    }
}

std::string padded_id(const char* prefix, int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%05d", prefix, index);
    return buf;
}

Eigen::VectorXd cnn_row(int chosen, int num_classes) {
    Eigen::VectorXd row(num_classes);
    const double rest = 0.2 / (num_classes - 1);
    row.setConstant(rest);
    row(chosen) = 0.8;
    return row;
}

int pick_prediction(DeterministicRng& rng, int true_class, double accuracy, int num_classes) {
    if (rng.next_unit() < accuracy) return true_class;
    const int offset = 1 + static_cast<int>(rng.next_below(num_classes - 1));
    return (true_class + offset) % num_classes;
}

// Quota flags: exactly round(rate * n) true entries, shuffled. Realizes the
// designed rates exactly within every (class, split) group instead of
// leaving them to coin-flip variance.
std::vector<bool> quota_flags(int n, double rate, DeterministicRng& rng) {
    const int quota = static_cast<int>(std::lround(rate * n));
    std::vector<bool> flags(n, false);
    for (int i = 0; i < quota && i < n; ++i) flags[i] = true;
    rng.shuffle(flags);
    return flags;
}

} // namespace

SynthDataset generate_synthetic(const SynthSpec& spec) {
    if (spec.num_classes < 2) throw InputError("BadSpec", "need at least 2 classes");
    if (spec.n_per_class < 3) throw InputError("BadSpec", "need at least 3 images per class");
    if (spec.image_side < 4) throw InputError("BadSpec", "image side must be at least 4");
    check_unit(spec.color_separation, "color_separation");
    check_unit(spec.color_fidelity, "color_fidelity");
    check_unit(spec.texture_separation, "texture_separation");
    check_unit(spec.texture_fidelity, "texture_fidelity");
    if (spec.noise_sigma < 0) throw InputError("BadSpec", "noise_sigma must be >= 0");
    std::vector<double> accuracy = spec.cnn_accuracy;
    if (accuracy.empty()) accuracy.assign(spec.num_classes, 1.0);
    if (static_cast<int>(accuracy.size()) != spec.num_classes) {
        throw InputError("BadSpec", "cnn_accuracy must have one entry per class");
    }
    for (double a : accuracy) check_unit(a, "cnn_accuracy");

    DeterministicRng rng(spec.seed);
    const int k = spec.num_classes;
    const int side = spec.image_side;

    // Class signatures: base colors on a hue circle, checkerboard period
    // growing with the class index.
    std::vector<std::array<double, 3>> base_color(k);
    std::vector<int> period(k);
    const int period_step = static_cast<int>(std::lround(4.0 * spec.texture_separation));
    for (int c = 0; c < k; ++c) {
        const double theta = 2.0 * M_PI * c / k;
        for (int ch = 0; ch < 3; ++ch) {
            base_color[c][ch] =
                128.0 + 70.0 * spec.color_separation * std::cos(theta + ch * 2.0 * M_PI / 3.0);
        }
        period[c] = 2 + period_step * c;
    }

    // Split first so the fidelity and accuracy quotas below are realized
    // exactly inside every (class, split) group, not just in expectation.
    std::vector<ManifestEntry> entries;
    int index = 0;
    for (int c = 0; c < k; ++c) {
        for (int i = 0; i < spec.n_per_class; ++i, ++index) {
            const std::string id = padded_id("img", index);
            entries.push_back({id, "images/" + id + ".png", "class_" + std::to_string(c),
                               std::nullopt});
        }
    }
    SynthDataset out;
    out.manifest = auto_split(make_manifest(std::move(entries)), spec.split_ratios,
                              spec.seed + 1);

    const int n_total = k * spec.n_per_class;
    std::vector<int> color_class(n_total), texture_class(n_total), cnn_choice(n_total);
    for (int c = 0; c < k; ++c) {
        for (Split split : {Split::train, Split::valid, Split::test}) {
            std::vector<int> group;
            for (int i = 0; i < n_total; ++i) {
                if (out.manifest.entries[i].split == split && i / spec.n_per_class == c) {
                    group.push_back(i);
                }
            }
            const int n = static_cast<int>(group.size());
            const auto color_own = quota_flags(n, spec.color_fidelity, rng);
            const auto texture_own = quota_flags(n, spec.texture_fidelity, rng);
            const auto cnn_correct = quota_flags(n, accuracy[c], rng);
            // Redraws and wrong predictions cycle deterministically over the
            // classes so their composition is quota-exact too.
            int color_cycle = 0, texture_cycle = 0, cnn_cycle = 0;
            for (int j = 0; j < n; ++j) {
                const int i = group[j];
                color_class[i] = color_own[j] ? c : (color_cycle++ % k);
                texture_class[i] = texture_own[j] ? c : (texture_cycle++ % k);
                cnn_choice[i] = cnn_correct[j] ? c : (c + 1 + (cnn_cycle++ % (k - 1))) % k;
            }
        }
    }

    std::vector<std::pair<std::string, Eigen::VectorXd>> cnn_rows;
    for (int i = 0; i < n_total; ++i) {
        const int p = period[texture_class[i]];
        ImageRgb img(side, side);
        for (int r = 0; r < side; ++r) {
            for (int col = 0; col < side; ++col) {
                const double wave = ((r / p) + (col / p)) % 2 == 0 ? 40.0 : -40.0;
                for (int ch = 0; ch < 3; ++ch) {
                    const double v = base_color[color_class[i]][ch] + wave +
                                     spec.noise_sigma * rng.next_gaussian();
                    img.at(r, col, ch) =
                        static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
                }
            }
        }
        out.images.push_back(std::move(img));
        cnn_rows.emplace_back(out.manifest.entries[i].image_id, cnn_row(cnn_choice[i], k));
    }

    out.cnn = make_cnn_table(out.manifest.label_names, std::move(cnn_rows),
                             "synthetic seed=" + std::to_string(spec.seed));
    return out;
}

void save_synth_dataset(const SynthDataset& data, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(dir) / "images");
    for (std::size_t i = 0; i < data.images.size(); ++i) {
        save_png(data.images[i], (fs::path(dir) / data.manifest.entries[i].path).string());
    }
    save_manifest(data.manifest, (fs::path(dir) / "manifest.csv").string());
    save_cnn_table(data.cnn, (fs::path(dir) / "cnn_probs.csv").string());
}

LabeledDataset synthetic_feature_dataset(const FeatureSynthSpec& spec) {
    if (spec.num_classes < 2) throw InputError("BadSpec", "need at least 2 classes");
    if (spec.n_per_class < 3) throw InputError("BadSpec", "need at least 3 rows per class");
    if (spec.noise_sigma < 0) throw InputError("BadSpec", "noise_sigma must be >= 0");

    const auto families = indicator_families("coarse");
    std::set<int> informative;
    for (const auto& name : spec.informative_families) {
        for (int c : find_family(families, name).columns) informative.insert(c);
    }

    const int k = spec.num_classes;
    const int n = k * spec.n_per_class;
    DeterministicRng rng(spec.seed);

    LabeledDataset ds;
    ds.feature_names = indicator_names();
    for (int c = 0; c < k; ++c) ds.label_names.push_back("class_" + std::to_string(c));
    ds.X.resize(n, kIndicatorCount);

    std::vector<ManifestEntry> entries;
    int index = 0;
    for (int c = 0; c < k; ++c) {
        for (int i = 0; i < spec.n_per_class; ++i, ++index) {
            const std::string id = padded_id("row", index);
            for (int col = 0; col < kIndicatorCount; ++col) {
                const double center = informative.count(col) ? c * spec.class_separation : 0.0;
                ds.X(index, col) = center + spec.noise_sigma * rng.next_gaussian();
            }
            ds.y.push_back(c);
            ds.ids.push_back(id);
            entries.push_back({id, "-", ds.label_names[c], std::nullopt});
        }
    }

    const DatasetManifest split_manifest =
        auto_split(make_manifest(std::move(entries)), spec.split_ratios, spec.seed + 1);
    ds.split.resize(n);
    for (int i = 0; i < n; ++i) ds.split[i] = *split_manifest.entries[i].split;
    return ds;
}

CnnProbabilityTable synthetic_cnn_table(const LabeledDataset& ds,
                                        const std::vector<double>& accuracy_per_class,
                                        std::uint64_t seed) {
    if (static_cast<int>(accuracy_per_class.size()) != ds.num_classes()) {
        throw InputError("BadSpec", "cnn_accuracy must have one entry per class");
    }
    for (double a : accuracy_per_class) check_unit(a, "cnn_accuracy");

    DeterministicRng rng(seed);
    std::vector<std::pair<std::string, Eigen::VectorXd>> rows;
    for (std::size_t i = 0; i < ds.ids.size(); ++i) {
        rows.emplace_back(
            ds.ids[i],
            cnn_row(pick_prediction(rng, ds.y[i], accuracy_per_class[ds.y[i]], ds.num_classes()),
                    ds.num_classes()));
    }
    return make_cnn_table(ds.label_names, std::move(rows),
                          "synthetic seed=" + std::to_string(seed));
}

} // namespace statfuse
