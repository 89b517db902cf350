#include "statfuse/indicators.hpp"
#include "statfuse/error.hpp"

#include <algorithm>
#include <cmath>

namespace statfuse {

namespace {

void check_channel(int channel) {
    if (channel < 0 || channel > 2) {
        throw InputError("BadChannelIndex", "channel must be 0, 1 or 2");
    }
}

} // namespace

const std::vector<std::string>& indicator_names() {
    static const std::vector<std::string> names = [] {
        const char* channels[3] = {"R", "G", "B"};
        const char* per_channel[16] = {
            "mean",         "std",          "skewness",        "hist_bin_1",
            "hist_bin_2",   "hist_bin_3",   "hist_bin_4",      "hist_bin_5",
            "tex_average",  "tex_variance", "tex_homogeneity", "tex_contrast",
            "tex_dissimilarity", "tex_entropy", "tex_second_moment", "tex_correlation"};
        std::vector<std::string> out;
        out.reserve(kIndicatorCount);
        for (const char* c : channels) {
            for (const char* f : per_channel) {
                out.push_back(std::string(f) + "_" + c);
            }
        }
        const char* pairs[3][2] = {{"R", "G"}, {"R", "B"}, {"G", "B"}};
        for (auto& p : pairs) out.push_back(std::string("diff_") + p[0] + "_" + p[1]);
        for (auto& p : pairs) out.push_back(std::string("ratio_") + p[0] + "_" + p[1]);
        return out;
    }();
    return names;
}

SpectralStats spectral_stats(const ImageRgb& img, int channel) {
    check_channel(channel);
    const std::size_t n = img.pixel_count();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += img.data[i * 3 + channel];
    const double mean = sum / static_cast<double>(n);

    double m2 = 0.0, m3 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = img.data[i * 3 + channel] - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);

    SpectralStats s;
    s.mean = mean;
    s.stddev = std::sqrt(m2);
    s.skewness = s.stddev > 0.0 ? m3 / (s.stddev * s.stddev * s.stddev) : 0.0;
    return s;
}

std::array<double, 5> histogram5(const ImageRgb& img, int channel) {
    check_channel(channel);
    std::array<std::size_t, 5> counts{};
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const int v = img.data[i * 3 + channel];
        const int bin = std::min(v * 5 / 256, 4);
        counts[bin] += 1;
    }
    std::array<double, 5> fractions{};
    for (int b = 0; b < 5; ++b) {
        fractions[b] = static_cast<double>(counts[b]) / static_cast<double>(n);
    }
    return fractions;
}

double channel_difference(const ImageRgb& img, int c1, int c2) {
    return spectral_stats(img, c1).mean - spectral_stats(img, c2).mean;
}

double channel_ratio(const ImageRgb& img, int c1, int c2) {
    const double denom = spectral_stats(img, c2).mean;
    if (denom == 0.0) return 0.0;
    return spectral_stats(img, c1).mean / denom;
}

TexturalFeatures textural_features(const Glcm& g) {
    const int z = g.levels;
    TexturalFeatures f;

    // Levels enter the formulas 1-based, so the sum-average index a+b runs
    // over 2..2Z. The deviation-based sums are shift-invariant.
    const double mu = g.mu_x + 1.0;
    double cross = 0.0;
    for (int a = 0; a < z; ++a) {
        for (int b = 0; b < z; ++b) {
            const double p = g.at(a, b);
            if (p == 0.0) continue;
            const double av = a + 1.0;
            const double bv = b + 1.0;
            const double d = av - bv;
            f.average += (av + bv) * p;
            f.variance += (av - mu) * (av - mu) * p;
            f.homogeneity += p / (1.0 + d * d);
            f.contrast += p * d * d;
            f.dissimilarity += p * std::abs(d);
            f.entropy -= p * std::log(p);
            f.second_moment += p * p;
            cross += av * bv * p;
        }
    }

    const double sigma_prod = g.sigma_x * g.sigma_y;
    if (sigma_prod > 0.0) {
        const double mu_x = g.mu_x + 1.0;
        const double mu_y = g.mu_y + 1.0;
        f.correlation = (cross - mu_x * mu_y) / sigma_prod;
    } else {
        f.correlation = 0.0;
    }
    return f;
}

IndicatorVector extract_indicators(const ImageRgb& img, const IndicatorConfig& config) {
    const ImageRgb* source = &img;
    ImageRgb resized;
    if (config.resize) {
        resized = resize_bilinear(img, config.resize_side);
        source = &resized;
    }

    IndicatorVector out;
    int idx = 0;
    double means[3];
    for (int c = 0; c < 3; ++c) {
        const SpectralStats s = spectral_stats(*source, c);
        means[c] = s.mean;
        out.values[idx++] = s.mean;
        out.values[idx++] = s.stddev;
        out.values[idx++] = s.skewness;

        const auto hist = histogram5(*source, c);
        for (double h : hist) out.values[idx++] = h;

        const Glcm g = build_glcm(quantize_channel(*source, c, config.glcm_levels),
                                  config.glcm_levels);
        for (double t : textural_features(g).as_array()) out.values[idx++] = t;
    }

    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (auto& p : pairs) out.values[idx++] = means[p[0]] - means[p[1]];
    for (auto& p : pairs) {
        out.values[idx++] = means[p[1]] == 0.0 ? 0.0 : means[p[0]] / means[p[1]];
    }
    return out;
}

} // namespace statfuse
