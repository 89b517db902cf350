#include "statfuse/pipeline.hpp"
#include "statfuse/error.hpp"
#include "statfuse/image.hpp"
#include "statfuse/indicators.hpp"
#include "statfuse/io.hpp"
#include "statfuse/synth.hpp"

#include <chrono>
#include <filesystem>
#include <mutex>
#include <ostream>
#include <thread>

namespace statfuse {

namespace {

namespace fs = std::filesystem;

RunConfig config_or_default(const std::string& path) {
    if (path.empty()) {
        RunConfig cfg;
        cfg.validate();
        return cfg;
    }
    return load_run_config(path);
}

std::string resolve_against(const std::string& base_dir, const std::string& path) {
    const fs::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (fs::path(base_dir) / p).string();
}

/// Splits from the manifest when present, otherwise a synthetic manifest
/// over the feature rows, auto-split with the config ratios.
DatasetManifest manifest_for_features(const std::string& manifest_path,
                                      const FeatureTable& features, const RunConfig& cfg) {
    if (!manifest_path.empty()) return prepare_manifest(manifest_path, cfg);
    std::vector<ManifestEntry> entries;
    for (std::size_t i = 0; i < features.ids.size(); ++i) {
        entries.push_back({features.ids[i], "-", features.labels[i], std::nullopt});
    }
    return auto_split(make_manifest(std::move(entries)), cfg.split_ratios, cfg.split_seed);
}

void log_split_metrics(std::ostream& log, const LabeledDataset& ds, const Classifier& model) {
    for (Split split : {Split::train, Split::valid, Split::test}) {
        const auto idx = ds.rows_in(split);
        if (idx.empty()) continue;
        const std::vector<int> pred = model.predict(ds.rows(idx));
        const std::vector<int> truth = ds.labels_at(idx);
        int correct = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == truth[i];
        log << split_name(split) << ": weighted_precision="
            << format_double(weighted_precision(truth, pred, ds.num_classes()))
            << " accuracy=" << format_double(correct / static_cast<double>(idx.size()))
            << " n=" << idx.size() << "\n";
    }
}

} // namespace

DatasetManifest prepare_manifest(const std::string& path, const RunConfig& cfg) {
    DatasetManifest manifest = load_manifest(path);
    if (!manifest.has_splits()) {
        manifest = auto_split(manifest, cfg.split_ratios, cfg.split_seed);
    }
    return manifest;
}

ExtractionResult extract_features(const DatasetManifest& manifest, const std::string& base_dir,
                                  const RunConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const IndicatorConfig icfg{cfg.glcm_levels, cfg.resize, cfg.resize_side};
    const int n = static_cast<int>(manifest.entries.size());

    FeatureTable table;
    table.feature_names = indicator_names();
    table.X.resize(n, kIndicatorCount);
    for (const auto& e : manifest.entries) {
        table.ids.push_back(e.image_id);
        table.labels.push_back(e.label);
    }

    // Index-strided workers write disjoint rows, so the table is identical
    // for any worker count.
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const unsigned hw = std::thread::hardware_concurrency();
    const int n_workers = std::max(1, std::min<int>(hw ? hw : 1, n));
    auto worker = [&](int w) {
        for (int i = w; i < n; i += n_workers) {
            try {
                const ImageRgb img =
                    load_image(resolve_against(base_dir, manifest.entries[i].path));
                const IndicatorVector v = extract_indicators(img, icfg);
                for (int j = 0; j < kIndicatorCount; ++j) table.X(i, j) = v.values[j];
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    if (n_workers == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker, w);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    ExtractionResult result;
    result.table = std::move(table);
    result.minutes =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;
    return result;
}

void run_extract(const ExtractOptions& opt, std::ostream& log) {
    RunConfig cfg = config_or_default(opt.config_path);
    if (opt.no_resize) cfg.resize = false;
    const DatasetManifest manifest = prepare_manifest(opt.manifest_path, cfg);
    const std::string base_dir = fs::path(opt.manifest_path).parent_path().string();
    ExtractionResult result = extract_features(manifest, base_dir, cfg);
    save_features_csv(result.table, opt.out_path);
    log << "extracted " << result.table.ids.size() << " rows to " << opt.out_path << " in "
        << format_double(result.minutes) << " minutes\n";
}

void run_train_features(const TrainFeaturesOptions& opt, std::ostream& log) {
    const RunConfig cfg = config_or_default(opt.config_path);
    const FeatureTable features = load_features_csv(opt.features_path);
    const DatasetManifest manifest = manifest_for_features(opt.manifest_path, features, cfg);
    const LabeledDataset ds = join_dataset(manifest, features);

    const auto model =
        train_classifier(cfg.feature_kind, ds, Split::train, cfg.hyper, cfg.seeds.front());
    save_classifier(*model, opt.out_path);
    log << "trained " << cfg.feature_kind << " feature classifier -> " << opt.out_path << "\n";
    log_split_metrics(log, ds, *model);
}

void save_fusion_bundle(const FusionModelBundle& bundle, const std::string& path) {
    nlohmann::ordered_json j;
    j["schema"] = "statfuse-fusion/1";
    j["labels"] = bundle.label_names;
    j["feature_model"] = bundle.feature_model->to_json();
    nlohmann::ordered_json models;
    for (const auto& [kind, model] : bundle.fusion_models) {
        models[method_name_for_kind(kind)] = model->to_json();
    }
    j["fusion_models"] = std::move(models);
    atomic_write_file(path, j.dump(2) + "\n");
}

FusionModelBundle load_fusion_bundle(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw InputError("BadModelFile", std::string("fusion bundle is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("schema").get<std::string>() != "statfuse-fusion/1") {
            throw InputError("BadModelFile", "unknown fusion bundle schema");
        }
        FusionModelBundle bundle;
        bundle.label_names = j.at("labels").get<std::vector<std::string>>();
        bundle.feature_model = classifier_from_json(j.at("feature_model"));
        for (const auto& [name, doc] : j.at("fusion_models").items()) {
            bundle.fusion_models.emplace_back(name, classifier_from_json(doc));
        }
        return bundle;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("BadModelFile", std::string("malformed fusion bundle: ") + e.what());
    }
}

void run_fuse(const FuseOptions& opt, std::ostream& log) {
    const RunConfig cfg = config_or_default(opt.config_path);
    const FeatureTable features = load_features_csv(opt.features_path);
    const DatasetManifest manifest = manifest_for_features(opt.manifest_path, features, cfg);
    const LabeledDataset ds = join_dataset(manifest, features);
    const CnnProbabilityTable cnn = load_cnn_table(opt.cnn_path, ds.label_names);

    FusionModelBundle bundle;
    bundle.label_names = ds.label_names;
    bundle.feature_model =
        train_classifier(cfg.feature_kind, ds, Split::train, cfg.hyper, cfg.seeds.front());
    const Split fusion_split = parse_split(cfg.fusion_split);
    for (const std::string& kind : cfg.fusion_kinds) {
        bundle.fusion_models.emplace_back(
            kind, train_fusion(kind, cnn, *bundle.feature_model, ds, fusion_split, cfg.hyper,
                               cfg.seeds.front()));
        log << "trained fusion kind " << kind << "\n";
    }
    save_fusion_bundle(bundle, opt.out_path);
    log << "wrote fusion bundle -> " << opt.out_path << "\n";
}

EvaluationReport run_evaluate(const EvaluateOptions& opt, std::ostream& log) {
    RunConfig cfg = config_or_default(opt.config_path);
    if (opt.no_resize) cfg.resize = false;
    const DatasetManifest manifest = prepare_manifest(opt.manifest_path, cfg);
    const std::string base_dir = fs::path(opt.manifest_path).parent_path().string();

    std::vector<std::string> hashed_inputs = {opt.manifest_path};
    FeatureTable features;
    double extraction_minutes = 0.0;
    if (opt.features_path.empty()) {
        ExtractionResult extracted = extract_features(manifest, base_dir, cfg);
        features = std::move(extracted.table);
        extraction_minutes = extracted.minutes;
        for (const auto& e : manifest.entries) {
            hashed_inputs.push_back(resolve_against(base_dir, e.path));
        }
    } else {
        features = load_features_csv(opt.features_path);
        hashed_inputs.push_back(opt.features_path);
    }
    hashed_inputs.push_back(opt.cnn_path);

    const LabeledDataset ds = join_dataset(manifest, features);
    const CnnProbabilityTable cnn = load_cnn_table(opt.cnn_path, ds.label_names);

    EvaluationReport report = evaluate(ds, cnn, cfg);
    report.input_hash = content_hash(hashed_inputs);
    report.timing.feature_extraction_minutes = extraction_minutes;

    atomic_write_file(opt.report_path, report_to_json(report).dump(2) + "\n");
    const std::string timing_path =
        opt.timing_path.empty() ? opt.report_path + ".timing.json" : opt.timing_path;
    atomic_write_file(timing_path, timing_to_json(report.timing).dump(2) + "\n");
    log << report_to_text(report);
    log << "report -> " << opt.report_path << "\ntimings -> " << timing_path << "\n";
    return report;
}

AblationResult run_ablate(const AblateOptions& opt, std::ostream& log) {
    RunConfig cfg = config_or_default(opt.config_path);
    if (opt.no_resize) cfg.resize = false;
    const DatasetManifest manifest = prepare_manifest(opt.manifest_path, cfg);
    const std::string base_dir = fs::path(opt.manifest_path).parent_path().string();

    FeatureTable features;
    if (opt.features_path.empty()) {
        features = extract_features(manifest, base_dir, cfg).table;
    } else {
        features = load_features_csv(opt.features_path);
    }
    const LabeledDataset ds = join_dataset(manifest, features);
    const CnnProbabilityTable cnn = load_cnn_table(opt.cnn_path, ds.label_names);

    const AblationResult result = ablation_matrix(ds, cnn, cfg);
    atomic_write_file(opt.out_path, ablation_csv(result));
    log << "ablation grid (" << result.rows.size() << " families x " << result.methods.size()
        << " methods) -> " << opt.out_path << "\n";
    return result;
}

void run_synth(const SynthOptions& opt, std::ostream& log) {
    SynthSpec spec;
    if (!opt.spec_path.empty()) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_file(opt.spec_path));
        } catch (const nlohmann::json::exception& e) {
            throw InputError("BadSpec", std::string("synth spec is not valid JSON: ") + e.what());
        }
        try {
            spec.num_classes = j.value("num_classes", spec.num_classes);
            spec.n_per_class = j.value("n_per_class", spec.n_per_class);
            spec.image_side = j.value("image_side", spec.image_side);
            spec.color_separation = j.value("color_separation", spec.color_separation);
            spec.color_fidelity = j.value("color_fidelity", spec.color_fidelity);
            spec.texture_separation = j.value("texture_separation", spec.texture_separation);
            spec.texture_fidelity = j.value("texture_fidelity", spec.texture_fidelity);
            spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
            if (j.contains("cnn_accuracy")) {
                spec.cnn_accuracy = j.at("cnn_accuracy").get<std::vector<double>>();
            }
            spec.seed = j.value("seed", spec.seed);
            if (j.contains("split_ratios")) {
                spec.split_ratios = j.at("split_ratios").get<std::array<double, 3>>();
            }
        } catch (const nlohmann::json::exception& e) {
            throw InputError("BadSpec", std::string("malformed synth spec: ") + e.what());
        }
    }
    const SynthDataset data = generate_synthetic(spec);
    save_synth_dataset(data, opt.out_dir);
    log << "synthetic dataset: " << data.images.size() << " images, "
        << data.manifest.label_names.size() << " classes -> " << opt.out_dir << "\n";
}

} // namespace statfuse
