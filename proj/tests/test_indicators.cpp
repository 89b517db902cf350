#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "statfuse/error.hpp"
#include "statfuse/indicators.hpp"

#include <cmath>
#include <numeric>
#include <random>

using namespace statfuse;

namespace {

ImageRgb image_from_channel(const std::vector<std::uint8_t>& values, int w, int h) {
    ImageRgb img(w, h);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        img.data[i * 3] = img.data[i * 3 + 1] = img.data[i * 3 + 2] = values[i];
    }
    return img;
}

ImageRgb random_image(std::mt19937& rng, int w, int h) {
    ImageRgb img(w, h);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng() & 0xFF);
    return img;
}

// Independent scalar reference for the whole 54-vector, evaluating every
// definition directly (its own GLCM accumulation, antidiagonal sum for the
// textural average, explicit marginal moments).
std::vector<double> reference_indicators(const ImageRgb& img, int z) {
    std::vector<double> out;
    const std::size_t n = img.pixel_count();
    double means[3];

    for (int c = 0; c < 3; ++c) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += img.data[i * 3 + c];
        mean /= static_cast<double>(n);
        means[c] = mean;
        double var = 0.0, m3 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = img.data[i * 3 + c] - mean;
            var += d * d;
            m3 += d * d * d;
        }
        var /= static_cast<double>(n);
        m3 /= static_cast<double>(n);
        const double sd = std::sqrt(var);
        out.push_back(mean);
        out.push_back(sd);
        out.push_back(sd > 0 ? m3 / (sd * sd * sd) : 0.0);

        double bins[5] = {0, 0, 0, 0, 0};
        for (std::size_t i = 0; i < n; ++i) {
            bins[std::min(img.data[i * 3 + c] * 5 / 256, 4)] += 1.0;
        }
        for (double b : bins) out.push_back(b / static_cast<double>(n));

        // GLCM with 1-based values a,b in [1, z].
        std::vector<double> p(static_cast<std::size_t>(z) * z, 0.0);
        double deposits = 0.0;
        for (int r = 0; r < img.height; ++r) {
            for (int col = 0; col + 1 < img.width; ++col) {
                const int a = img.at(r, col, c) * z / 256;
                const int b = img.at(r, col + 1, c) * z / 256;
                p[static_cast<std::size_t>(a) * z + b] += 1.0;
                p[static_cast<std::size_t>(b) * z + a] += 1.0;
                deposits += 2.0;
            }
        }
        for (auto& v : p) v /= deposits;

        std::vector<double> px(z, 0.0), py(z, 0.0);
        for (int a = 0; a < z; ++a) {
            for (int b = 0; b < z; ++b) {
                px[a] += p[static_cast<std::size_t>(a) * z + b];
                py[b] += p[static_cast<std::size_t>(a) * z + b];
            }
        }
        double mu_x = 0.0, mu_y = 0.0;
        for (int a = 0; a < z; ++a) {
            mu_x += (a + 1.0) * px[a];
            mu_y += (a + 1.0) * py[a];
        }
        double var_x = 0.0, var_y = 0.0;
        for (int a = 0; a < z; ++a) {
            var_x += (a + 1.0 - mu_x) * (a + 1.0 - mu_x) * px[a];
            var_y += (a + 1.0 - mu_y) * (a + 1.0 - mu_y) * py[a];
        }
        const double sx = std::sqrt(var_x), sy = std::sqrt(var_y);

        double tex_avg = 0.0;
        for (int k = 2; k <= 2 * z; ++k) {
            double mass = 0.0;
            for (int a = 1; a <= z; ++a) {
                for (int b = 1; b <= z; ++b) {
                    if (a + b == k) mass += p[static_cast<std::size_t>(a - 1) * z + (b - 1)];
                }
            }
            tex_avg += k * mass;
        }
        double tex_var = 0.0, homog = 0.0, contrast = 0.0, dissim = 0.0, entropy = 0.0,
               second = 0.0, cross = 0.0;
        for (int a = 1; a <= z; ++a) {
            for (int b = 1; b <= z; ++b) {
                const double v = p[static_cast<std::size_t>(a - 1) * z + (b - 1)];
                tex_var += (a - mu_x) * (a - mu_x) * v;
                homog += v / (1.0 + (a - b) * (a - b));
                contrast += v * (a - b) * (a - b);
                dissim += v * std::abs(a - b);
                if (v > 0) entropy -= v * std::log(v);
                second += v * v;
                cross += a * b * v;
            }
        }
        const double corr = (sx * sy) > 0 ? (cross - mu_x * mu_y) / (sx * sy) : 0.0;
        out.push_back(tex_avg);
        out.push_back(tex_var);
        out.push_back(homog);
        out.push_back(contrast);
        out.push_back(dissim);
        out.push_back(entropy);
        out.push_back(second);
        out.push_back(corr);
    }

    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (auto& pr : pairs) out.push_back(means[pr[0]] - means[pr[1]]);
    for (auto& pr : pairs) {
        out.push_back(means[pr[1]] == 0 ? 0.0 : means[pr[0]] / means[pr[1]]);
    }
    return out;
}

} // namespace

TEST_CASE("indicator names are 54, unique and stable") {
    const auto& names = indicator_names();
    REQUIRE(names.size() == 54);
    CHECK(names.front() == "mean_R");
    CHECK(names[16] == "mean_G");
    CHECK(names[47] == "tex_correlation_B");
    CHECK(names[48] == "diff_R_G");
    CHECK(names.back() == "ratio_G_B");
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (std::size_t j = i + 1; j < names.size(); ++j) REQUIRE(names[i] != names[j]);
    }
}

TEST_CASE("spectral stats hand cases") {
    SUBCASE("constant channel") {
        ImageRgb img = image_from_channel({100, 100, 100, 100}, 2, 2);
        const SpectralStats s = spectral_stats(img, 0);
        CHECK(s.mean == 100.0);
        CHECK(s.stddev == 0.0);
        CHECK(s.skewness == 0.0);
    }
    SUBCASE("symmetric two-point distribution") {
        ImageRgb img = image_from_channel({0, 0, 255, 255}, 2, 2);
        const SpectralStats s = spectral_stats(img, 1);
        CHECK(s.mean == 127.5);
        CHECK(s.stddev == 127.5);
        CHECK(s.skewness == 0.0);
    }
    SUBCASE("skewed distribution") {
        ImageRgb img = image_from_channel({0, 0, 0, 255}, 2, 2);
        const SpectralStats s = spectral_stats(img, 2);
        CHECK(s.mean == doctest::Approx(63.75).epsilon(1e-12));
        CHECK(s.stddev == doctest::Approx(110.41823898251593).epsilon(1e-9));
        CHECK(s.skewness == doctest::Approx(1.1547005383792515).epsilon(1e-9));
    }
    SUBCASE("bad channel") {
        ImageRgb img = image_from_channel({0, 0, 0, 0}, 2, 2);
        CHECK_THROWS_AS(spectral_stats(img, 3), InputError);
    }
}

TEST_CASE("histogram5 hand cases") {
    SUBCASE("constant 0") {
        const auto h = histogram5(image_from_channel({0, 0, 0, 0}, 2, 2), 0);
        CHECK(h == std::array<double, 5>{1, 0, 0, 0, 0});
    }
    SUBCASE("constant 255") {
        const auto h = histogram5(image_from_channel({255, 255, 255, 255}, 2, 2), 0);
        CHECK(h == std::array<double, 5>{0, 0, 0, 0, 1});
    }
    SUBCASE("half 0 half 128") {
        const auto h = histogram5(image_from_channel({0, 128, 0, 128}, 2, 2), 0);
        CHECK(h == std::array<double, 5>{0.5, 0, 0.5, 0, 0});
    }
    SUBCASE("bin boundaries follow floor(v*5/256)") {
        const auto low = histogram5(image_from_channel({51, 52, 102, 103}, 2, 2), 0);
        CHECK(low == std::array<double, 5>{0.25, 0.5, 0.25, 0, 0});
        const auto high = histogram5(image_from_channel({0, 204, 205, 255}, 2, 2), 0);
        CHECK(high == std::array<double, 5>{0.25, 0, 0, 0.25, 0.5});
    }
}

TEST_CASE("channel difference and ratio") {
    ImageRgb img(2, 2);
    for (std::size_t i = 0; i < 4; ++i) {
        img.data[i * 3 + 0] = 100;
        img.data[i * 3 + 1] = 50;
        img.data[i * 3 + 2] = 0;
    }
    CHECK(channel_difference(img, 0, 1) == 50.0);
    CHECK(channel_ratio(img, 0, 1) == 2.0);
    CHECK(channel_difference(img, 1, 1) == 0.0);
    CHECK(channel_ratio(img, 1, 1) == 1.0);
    CHECK(channel_ratio(img, 0, 2) == 0.0); // zero-mean denominator convention
}

TEST_CASE("textural features on the diagonal two-level GLCM") {
    const Glcm g = Glcm::from_probabilities({0.5, 0.0, 0.0, 0.5}, 2);
    const TexturalFeatures f = textural_features(g);
    CHECK(f.average == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.contrast == 0.0);
    CHECK(f.dissimilarity == 0.0);
    CHECK(f.entropy == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(f.second_moment == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f.homogeneity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.correlation == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.variance == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("textural features on a one-cell GLCM") {
    std::vector<double> p(9, 0.0);
    p[4] = 1.0; // p(1,1) for z = 3
    const TexturalFeatures f = textural_features(Glcm::from_probabilities(p, 3));
    CHECK(f.entropy == 0.0);
    CHECK(f.second_moment == 1.0);
    CHECK(f.contrast == 0.0);
    CHECK(f.correlation == 0.0); // sigma = 0 convention
}

TEST_CASE("textural features on the uniform two-level GLCM") {
    const Glcm g = Glcm::from_probabilities({0.25, 0.25, 0.25, 0.25}, 2);
    const TexturalFeatures f = textural_features(g);
    CHECK(f.second_moment == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(f.entropy == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(f.correlation == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("constant grey image composes the degenerate cases") {
    ImageRgb img = image_from_channel(std::vector<std::uint8_t>(16, 119), 4, 4);
    const IndicatorConfig cfg{.glcm_levels = 8, .resize = false};
    const auto v = extract_indicators(img, cfg).values;
    const auto& names = indicator_names();
    for (int c = 0; c < 3; ++c) {
        CHECK(v[16 * c + 0] == 119.0);        // mean
        CHECK(v[16 * c + 1] == 0.0);          // std
        CHECK(v[16 * c + 2] == 0.0);          // skewness
        CHECK(v[16 * c + 13] == 0.0);         // tex_entropy
        CHECK(v[16 * c + 14] == 1.0);         // tex_second_moment
        CHECK(names[16 * c + 13] == std::string("tex_entropy_") + "RGB"[c]);
    }
    for (int i = 48; i < 51; ++i) CHECK(v[i] == 0.0); // diffs
    for (int i = 51; i < 54; ++i) CHECK(v[i] == 1.0); // ratios
}

TEST_CASE("row permutation leaves textural features unchanged") {
    std::mt19937 rng(31);
    ImageRgb img = random_image(rng, 6, 5);
    ImageRgb permuted = img;
    const int order[5] = {3, 0, 4, 1, 2};
    for (int r = 0; r < 5; ++r) {
        std::copy_n(img.data.begin() + static_cast<std::size_t>(order[r]) * 6 * 3, 6 * 3,
                    permuted.data.begin() + static_cast<std::size_t>(r) * 6 * 3);
    }
    const IndicatorConfig cfg{.glcm_levels = 16, .resize = false};
    const auto a = extract_indicators(img, cfg).values;
    const auto b = extract_indicators(permuted, cfg).values;
    for (int c = 0; c < 3; ++c) {
        for (int k = 8; k < 16; ++k) {
            CHECK(a[16 * c + k] == b[16 * c + k]);
        }
    }
}

TEST_CASE("fixed 4x4 fixture matches the scalar reference on all 54 features") {
    // Deterministic fixture with varied texture and color.
    ImageRgb img(4, 4);
    const std::uint8_t fixture[16][3] = {
        {12, 240, 99},  {87, 13, 250},  {200, 160, 3},  {255, 77, 77},
        {0, 0, 128},    {34, 210, 55},  {90, 90, 90},   {180, 20, 220},
        {66, 133, 7},   {255, 255, 0},  {21, 42, 84},   {120, 60, 30},
        {5, 250, 125},  {199, 9, 99},   {60, 160, 210}, {240, 1, 160}};
    for (int i = 0; i < 16; ++i) {
        for (int c = 0; c < 3; ++c) img.data[static_cast<std::size_t>(i) * 3 + c] = fixture[i][c];
    }
    const int z = 4;
    const auto got = extract_indicators(img, {.glcm_levels = z, .resize = false}).values;
    const auto expected = reference_indicators(img, z);
    REQUIRE(expected.size() == 54);
    for (int i = 0; i < 54; ++i) {
        INFO("feature ", indicator_names()[i]);
        CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    }
}

TEST_CASE("indicator invariants hold for random images") {
    std::mt19937 rng(555);
    const auto& names = indicator_names();
    for (int trial = 0; trial < 60; ++trial) {
        const int w = 2 + static_cast<int>(rng() % 30);
        const int h = 2 + static_cast<int>(rng() % 30);
        ImageRgb img = random_image(rng, w, h);
        const auto v = extract_indicators(img, {.glcm_levels = 32, .resize = false}).values;
        for (int i = 0; i < 54; ++i) {
            INFO("feature ", names[i]);
            REQUIRE(std::isfinite(v[i]));
        }
        for (int c = 0; c < 3; ++c) {
            const double hist_sum = v[16 * c + 3] + v[16 * c + 4] + v[16 * c + 5] +
                                    v[16 * c + 6] + v[16 * c + 7];
            REQUIRE(std::abs(hist_sum - 1.0) < 1e-9);
            REQUIRE(v[16 * c + 1] >= 0.0);                          // std
            REQUIRE(v[16 * c + 10] > 0.0);                          // homogeneity
            REQUIRE(v[16 * c + 10] <= 1.0 + 1e-12);
            REQUIRE(v[16 * c + 13] >= 0.0);                         // entropy
            REQUIRE(v[16 * c + 14] > 0.0);                          // second moment
            REQUIRE(v[16 * c + 14] <= 1.0 + 1e-12);
            REQUIRE(std::abs(v[16 * c + 15]) <= 1.0 + 1e-9);        // correlation
            // dissimilarity^2 <= contrast (Cauchy-Schwarz under p)
            REQUIRE(v[16 * c + 12] * v[16 * c + 12] <= v[16 * c + 11] + 1e-9);
        }
    }
}

TEST_CASE("adding a constant shifts means and leaves shape stats unchanged") {
    std::mt19937 rng(77);
    ImageRgb img(8, 8);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng() % 200); // headroom of 55
    const int delta = 40;
    ImageRgb shifted = img;
    for (auto& v : shifted.data) v = static_cast<std::uint8_t>(v + delta);

    const IndicatorConfig cfg{.glcm_levels = 32, .resize = false};
    const auto a = extract_indicators(img, cfg).values;
    const auto b = extract_indicators(shifted, cfg).values;
    for (int c = 0; c < 3; ++c) {
        CHECK(b[16 * c + 0] == doctest::Approx(a[16 * c + 0] + delta).epsilon(1e-12));
        CHECK(b[16 * c + 1] == doctest::Approx(a[16 * c + 1]).epsilon(1e-9));
        CHECK(b[16 * c + 2] == doctest::Approx(a[16 * c + 2]).epsilon(1e-9));
    }
    for (int i = 48; i < 51; ++i) {
        CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-9)); // differences unchanged
    }
}

TEST_CASE("2x pixel replication leaves spectral statistics unchanged") {
    std::mt19937 rng(88);
    ImageRgb img = random_image(rng, 6, 4);
    ImageRgb up(12, 8);
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 12; ++c) {
            for (int ch = 0; ch < 3; ++ch) up.at(r, c, ch) = img.at(r / 2, c / 2, ch);
        }
    }
    const IndicatorConfig cfg{.glcm_levels = 32, .resize = false};
    const auto a = extract_indicators(img, cfg).values;
    const auto b = extract_indicators(up, cfg).values;
    for (int c = 0; c < 3; ++c) {
        for (int k : {0, 1, 2, 3, 4, 5, 6, 7}) { // mean, std, skew, hist bins
            CHECK(b[16 * c + k] == doctest::Approx(a[16 * c + k]).epsilon(1e-9));
        }
    }
}
