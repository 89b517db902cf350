#include "statfuse/error.hpp"
#include "statfuse/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace statfuse;

int main(int argc, char** argv) {
    CLI::App app{"statistical indicator extraction, classifier training and CNN "
                 "probability fusion for image classification"};
    app.require_subcommand(1);

    ExtractOptions extract_opt;
    auto* extract = app.add_subcommand("extract", "extract the 54 indicators to a features CSV");
    extract->add_option("--manifest", extract_opt.manifest_path, "manifest CSV")->required();
    extract->add_option("--config", extract_opt.config_path, "run config JSON");
    extract->add_option("--out", extract_opt.out_path, "output features CSV")->required();
    extract->add_flag("--no-resize", extract_opt.no_resize,
                      "compute indicators on the original resolution");

    TrainFeaturesOptions train_opt;
    auto* train = app.add_subcommand("train-features", "train the feature classifier");
    train->add_option("--features", train_opt.features_path, "features CSV")->required();
    train->add_option("--manifest", train_opt.manifest_path,
                      "manifest CSV for split assignments");
    train->add_option("--config", train_opt.config_path, "run config JSON");
    train->add_option("--out", train_opt.out_path, "output model JSON")->required();

    FuseOptions fuse_opt;
    auto* fuse = app.add_subcommand("fuse", "train the fusion classifier variants");
    fuse->add_option("--features", fuse_opt.features_path, "features CSV")->required();
    fuse->add_option("--manifest", fuse_opt.manifest_path, "manifest CSV for split assignments");
    fuse->add_option("--cnn-probs", fuse_opt.cnn_path, "CNN probability CSV")->required();
    fuse->add_option("--config", fuse_opt.config_path, "run config JSON");
    fuse->add_option("--out", fuse_opt.out_path, "output fusion bundle JSON")->required();

    EvaluateOptions eval_opt;
    auto* evaluate = app.add_subcommand("evaluate", "run the full evaluation protocol");
    evaluate->add_option("--manifest", eval_opt.manifest_path, "manifest CSV")->required();
    evaluate->add_option("--features", eval_opt.features_path,
                         "features CSV (omit to extract from the images)");
    evaluate->add_option("--cnn-probs", eval_opt.cnn_path, "CNN probability CSV")->required();
    evaluate->add_option("--config", eval_opt.config_path, "run config JSON");
    evaluate->add_option("--out", eval_opt.report_path, "output report JSON")->required();
    evaluate->add_option("--timings-out", eval_opt.timing_path,
                         "timing JSON (default: <out>.timing.json)");
    evaluate->add_flag("--no-resize", eval_opt.no_resize,
                       "compute indicators on the original resolution");

    AblateOptions ablate_opt;
    auto* ablate = app.add_subcommand("ablate", "leave-one-family-out ablation grid");
    ablate->add_option("--manifest", ablate_opt.manifest_path, "manifest CSV")->required();
    ablate->add_option("--features", ablate_opt.features_path,
                       "features CSV (omit to extract from the images)");
    ablate->add_option("--cnn-probs", ablate_opt.cnn_path, "CNN probability CSV")->required();
    ablate->add_option("--config", ablate_opt.config_path, "run config JSON");
    ablate->add_option("--out", ablate_opt.out_path, "output ablation CSV")->required();
    ablate->add_flag("--no-resize", ablate_opt.no_resize,
                     "compute indicators on the original resolution");

    SynthOptions synth_opt;
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("--spec", synth_opt.spec_path, "synth spec JSON (omit for defaults)");
    synth->add_option("--out", synth_opt.out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
        if (*extract) run_extract(extract_opt, std::cout);
        if (*train) run_train_features(train_opt, std::cout);
        if (*fuse) run_fuse(fuse_opt, std::cout);
        if (*evaluate) run_evaluate(eval_opt, std::cout);
        if (*ablate) run_ablate(ablate_opt, std::cout);
        if (*synth) run_synth(synth_opt, std::cout);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: Internal: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
