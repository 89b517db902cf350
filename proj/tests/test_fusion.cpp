#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "statfuse/error.hpp"
#include "statfuse/fusion.hpp"
#include "statfuse/rng.hpp"
#include "statfuse/synth.hpp"

#include <cmath>
#include <filesystem>

using namespace statfuse;

namespace {

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

// Brute-force oracle: per-class precision from direct scans over the label
// vectors, no confusion matrix.
double weighted_precision_oracle(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                                 int k) {
    const double n = static_cast<double>(y_true.size());
    double total = 0.0;
    for (int c = 0; c < k; ++c) {
        int support = 0, predicted = 0, correct = 0;
        for (std::size_t i = 0; i < y_true.size(); ++i) {
            if (y_true[i] == c) ++support;
            if (y_pred[i] == c) {
                ++predicted;
                if (y_true[i] == c) ++correct;
            }
        }
        const double precision = predicted > 0 ? correct / static_cast<double>(predicted) : 0.0;
        total += (support / n) * precision;
    }
    return total;
}

} // namespace

TEST_CASE("fuse_average hand cases") {
    CHECK(fuse_average(vec2(1, 0), vec2(0, 1)) == vec2(0.5, 0.5));
    CHECK(fuse_average(vec2(0.3, 0.7), vec2(0.3, 0.7)) == vec2(0.3, 0.7));
    CHECK(fuse_average(vec2(0.8, 0.2), vec2(0.4, 0.6)).isApprox(vec2(0.6, 0.4), 1e-15));
    Eigen::VectorXd three(3);
    three << 0.2, 0.3, 0.5;
    CHECK_THROWS_AS(fuse_average(vec2(1, 0), three), InputError);
}

TEST_CASE("fuse_average output is a valid probability vector") {
    DeterministicRng rng(8);
    for (int trial = 0; trial < 500; ++trial) {
        const int k = 2 + static_cast<int>(rng.next_below(7));
        Eigen::VectorXd a(k), b(k);
        for (int i = 0; i < k; ++i) {
            a(i) = rng.next_unit();
            b(i) = rng.next_unit();
        }
        a /= a.sum();
        b /= b.sum();
        const Eigen::VectorXd fused = fuse_average(a, b);
        CHECK(fused == 0.5 * (a + b)); // elementwise-mean oracle
        CHECK(std::abs(fused.sum() - 1.0) < 1e-9);
        CHECK(fused.minCoeff() >= 0.0);
    }
}

TEST_CASE("weighted precision hand cases") {
    CHECK(weighted_precision({0, 1, 2, 1}, {0, 1, 2, 1}, 3) == 1.0);
    CHECK(weighted_precision({0, 0, 1, 1}, {0, 1, 1, 1}, 2) ==
          doctest::Approx(5.0 / 6.0).epsilon(1e-15));
    // all class-0 predictions, balanced truth: 0.5*0.5 + 0.5*0 = 0.25
    CHECK(weighted_precision({0, 0, 1, 1}, {0, 0, 0, 0}, 2) == 0.25);
    CHECK_THROWS_AS(weighted_precision({}, {}, 2), InputError);
    CHECK_THROWS_AS(weighted_precision({0, 5}, {0, 0}, 2), InputError);
}

TEST_CASE("weighted precision matches the brute-force oracle exactly") {
    DeterministicRng rng(777);
    for (int trial = 0; trial < 1000; ++trial) {
        const int k = 2 + static_cast<int>(rng.next_below(5));
        const int n = 1 + static_cast<int>(rng.next_below(50));
        std::vector<int> y_true(n), y_pred(n);
        for (int i = 0; i < n; ++i) {
            y_true[i] = static_cast<int>(rng.next_below(k));
            y_pred[i] = static_cast<int>(rng.next_below(k));
        }
        REQUIRE(weighted_precision(y_true, y_pred, k) ==
                weighted_precision_oracle(y_true, y_pred, k));
    }
}

TEST_CASE("cnn table validation") {
    SUBCASE("row outside the 1e-4 sum tolerance is rejected, naming the id") {
        CHECK_THROWS_WITH_AS(
            make_cnn_table({"a", "b"}, {{"img_7", vec2(0.5, 0.3)}}, "test"),
            doctest::Contains("img_7"), InputError);
    }
    SUBCASE("row within tolerance is renormalized without changing the argmax") {
        DeterministicRng rng(4);
        for (int trial = 0; trial < 200; ++trial) {
            Eigen::VectorXd v(3);
            for (int i = 0; i < 3; ++i) v(i) = rng.next_unit();
            v /= v.sum();
            v *= 1.0 + (rng.next_unit() - 0.5) * 1.9e-4; // stay inside tolerance
            int argmax_before = 0;
            for (int i = 1; i < 3; ++i) {
                if (v(i) > v(argmax_before)) argmax_before = i;
            }
            const auto table = make_cnn_table({"a", "b", "c"}, {{"x", v}}, "test");
            const Eigen::VectorXd row = table.rows.at("x");
            CHECK(std::abs(row.sum() - 1.0) < 1e-12);
            int argmax_after = 0;
            for (int i = 1; i < 3; ++i) {
                if (row(i) > row(argmax_after)) argmax_after = i;
            }
            CHECK(argmax_after == argmax_before);
        }
    }
    SUBCASE("duplicates and negatives are rejected") {
        CHECK_THROWS_AS(make_cnn_table({"a", "b"},
                                       {{"x", vec2(1, 0)}, {"x", vec2(0, 1)}}, "test"),
                        InputError);
        CHECK_THROWS_AS(make_cnn_table({"a", "b"}, {{"x", vec2(1.5, -0.5)}}, "test"),
                        InputError);
    }
    SUBCASE("missing ids are reported") {
        const auto table = make_cnn_table({"a", "b"}, {{"x", vec2(1, 0)}}, "test");
        CHECK_THROWS_WITH_AS(table.rows_for({"x", "ghost"}), doctest::Contains("ghost"),
                             InputError);
    }
}

TEST_CASE("cnn table csv round trip and header validation") {
    namespace fs = std::filesystem;
    const std::string path = (fs::temp_directory_path() / "statfuse_cnn.csv").string();
    const auto table = make_cnn_table(
        {"cat", "dog"}, {{"img_1", vec2(0.75, 0.25)}, {"img_0", vec2(0.1, 0.9)}}, "test");
    save_cnn_table(table, path);
    const auto back = load_cnn_table(path, {"cat", "dog"});
    CHECK(back.label_names == table.label_names);
    CHECK(back.rows.at("img_0") == table.rows.at("img_0"));
    CHECK(back.rows.at("img_1") == table.rows.at("img_1"));
    CHECK_THROWS_AS(load_cnn_table(path, {"dog", "cat"}), InputError); // order matters
    fs::remove(path);
}

TEST_CASE("evaluate on a perfect cnn oracle reports exactly 1.0") {
    FeatureSynthSpec spec;
    spec.n_per_class = 40;
    spec.class_separation = 0.0; // features carry no signal
    spec.seed = 6;
    const LabeledDataset ds = synthetic_feature_dataset(spec);
    const auto cnn = synthetic_cnn_table(ds, {1.0, 1.0}, 6);

    RunConfig cfg;
    cfg.feature_kind = "lda";
    cfg.fusion_kinds = {"average", "logreg"};
    cfg.seeds = {1, 2, 3};
    const EvaluationReport report = evaluate(ds, cnn, cfg);

    const MethodResult* cnn_alone = report.find("cnn_alone");
    REQUIRE(cnn_alone != nullptr);
    CHECK(cnn_alone->mean_weighted_precision == 1.0);
    CHECK(cnn_alone->std_weighted_precision == 0.0);
    CHECK(cnn_alone->deterministic);

    // features_alone must equal the definitional pipeline metric
    const auto model = train_classifier("lda", ds, Split::train, cfg.hyper, cfg.seeds[0]);
    const auto test_idx = ds.rows_in(Split::test);
    const std::vector<int> pred = model->predict(ds.rows(test_idx));
    const double wp = weighted_precision(pred.empty() ? std::vector<int>{} : ds.labels_at(test_idx),
                                         pred, ds.num_classes());
    CHECK(report.find("features_alone")->mean_weighted_precision == wp);
    CHECK(report.find("features_alone")->std_weighted_precision == 0.0);

    // supports sum to the test size
    int support_total = 0;
    for (const auto& pc : cnn_alone->per_class) support_total += pc.support;
    CHECK(support_total == report.test_size);
}

TEST_CASE("fusion on a dominant cnn does not lose more than noise") {
    FeatureSynthSpec spec;
    spec.n_per_class = 60;
    spec.class_separation = 0.0; // random features
    spec.seed = 21;
    const LabeledDataset ds = synthetic_feature_dataset(spec);
    const auto cnn = synthetic_cnn_table(ds, {1.0, 1.0}, 21);

    RunConfig cfg;
    cfg.feature_kind = "rf";
    cfg.hyper.rf_trees = 60;
    cfg.fusion_kinds = {"logreg", "rf"};
    cfg.seeds = {1, 2, 3};
    const EvaluationReport report = evaluate(ds, cnn, cfg);
    for (const char* method : {"fusion_logreg", "fusion_rf"}) {
        CHECK(report.find(method)->mean_weighted_precision >=
              report.find("cnn_alone")->mean_weighted_precision - 0.01);
    }
}

TEST_CASE("identical one-hot oracles fuse to perfect precision") {
    FeatureSynthSpec spec;
    // train split must stay well above the 54 feature dimensions, otherwise
    // the pooled LDA covariance is near-singular
    spec.n_per_class = 200;
    spec.class_separation = 8.0; // features nail the class
    spec.noise_sigma = 0.5;
    spec.seed = 9;
    const LabeledDataset ds = synthetic_feature_dataset(spec);
    const auto cnn = synthetic_cnn_table(ds, {1.0, 1.0}, 9);

    RunConfig cfg;
    cfg.feature_kind = "lda";
    cfg.fusion_kinds = {"average", "lda", "logreg"};
    cfg.seeds = {1};
    const EvaluationReport report = evaluate(ds, cnn, cfg);
    for (const char* method : {"avg_fusion", "fusion_lda", "fusion_logreg"}) {
        CHECK(report.find(method)->mean_weighted_precision == 1.0);
    }
}

TEST_CASE("complementary experts: fusion beats both sources") {
    FeatureSynthSpec spec;
    spec.n_per_class = 150;
    spec.class_separation = 2.0;
    spec.noise_sigma = 1.0;
    spec.seed = 31;
    const LabeledDataset ds = synthetic_feature_dataset(spec);
    const auto cnn = synthetic_cnn_table(ds, {1.0, 0.5}, 31); // weak on class 1

    RunConfig cfg;
    cfg.feature_kind = "rf";
    cfg.hyper.rf_trees = 100;
    cfg.fusion_kinds = {"rf", "logreg"};
    cfg.seeds = {1, 2, 3, 4, 5};
    const EvaluationReport report = evaluate(ds, cnn, cfg);

    const double cnn_alone = report.find("cnn_alone")->mean_weighted_precision;
    const double features_alone = report.find("features_alone")->mean_weighted_precision;
    const double best_fused = std::max(report.find("fusion_rf")->mean_weighted_precision,
                                       report.find("fusion_logreg")->mean_weighted_precision);
    CHECK(best_fused > cnn_alone);
    CHECK(best_fused > features_alone);
}

TEST_CASE("train_fusion validates inputs") {
    FeatureSynthSpec spec;
    spec.n_per_class = 20;
    spec.seed = 2;
    const LabeledDataset ds = synthetic_feature_dataset(spec);
    const auto model = train_classifier("lda", ds, Split::train, Hyperparams{}, 0);

    SUBCASE("missing cnn rows surface as MissingProbabilities") {
        auto cnn = synthetic_cnn_table(ds, {1.0, 1.0}, 2);
        cnn.rows.erase(cnn.rows.begin());
        CHECK_THROWS_WITH_AS(
            train_fusion("lda", cnn, *model, ds, Split::train, Hyperparams{}, 0),
            doctest::Contains("MissingProbabilities"), InputError);
    }
    SUBCASE("test split is not a valid fusion split") {
        const auto cnn = synthetic_cnn_table(ds, {1.0, 1.0}, 2);
        CHECK_THROWS_AS(train_fusion("lda", cnn, *model, ds, Split::test, Hyperparams{}, 0),
                        InputError);
    }
}

TEST_CASE("collinear fusion inputs stay finite for lda and logreg") {
    // Both halves identical: perfectly collinear concatenated features.
    FeatureSynthSpec spec;
    spec.n_per_class = 30;
    spec.class_separation = 1.0;
    spec.seed = 12;
    const LabeledDataset ds = synthetic_feature_dataset(spec);
    const auto cnn = synthetic_cnn_table(ds, {0.9, 0.9}, 12);

    const auto idx = ds.rows_in(Split::train);
    std::vector<std::string> ids;
    for (int i : idx) ids.push_back(ds.ids[i]);
    const Eigen::MatrixXd half = cnn.rows_for(ids);
    Eigen::MatrixXd concat(half.rows(), 2 * half.cols());
    concat << half, half;

    for (const char* kind : {"lda", "logreg"}) {
        const auto fused =
            train_classifier(kind, concat, ds.labels_at(idx), ds.label_names, Hyperparams{}, 0);
        const Eigen::MatrixXd probs = fused->predict_proba(concat);
        CHECK(probs.allFinite());
    }
}

TEST_CASE("evaluate emits byte-identical reports for identical inputs") {
    FeatureSynthSpec spec;
    spec.n_per_class = 30;
    spec.seed = 44;
    const LabeledDataset ds = synthetic_feature_dataset(spec);
    const auto cnn = synthetic_cnn_table(ds, {0.8, 0.7}, 44);

    RunConfig cfg;
    cfg.feature_kind = "rf";
    cfg.hyper.rf_trees = 30;
    cfg.fusion_kinds = {"average", "rf"};
    cfg.seeds = {5, 6};
    const std::string a = report_to_json(evaluate(ds, cnn, cfg)).dump(2);
    const std::string b = report_to_json(evaluate(ds, cnn, cfg)).dump(2);
    CHECK(a == b);
}
