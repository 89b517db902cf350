#ifndef STATFUSE_INDICATORS_HPP
#define STATFUSE_INDICATORS_HPP

#include "statfuse/glcm.hpp"
#include "statfuse/image.hpp"

#include <array>
#include <string>
#include <vector>

namespace statfuse {

inline constexpr int kIndicatorCount = 54;

/// Canonical ordered feature names. Layout per channel c in {R,G,B}:
///   mean, std, skewness, hist_bin_1..hist_bin_5,
///   tex_average, tex_variance, tex_homogeneity, tex_contrast,
///   tex_dissimilarity, tex_entropy, tex_second_moment, tex_correlation
/// (16 x 3 = 48), then diff_R_G, diff_R_B, diff_G_B,
/// ratio_R_G, ratio_R_B, ratio_G_B.
const std::vector<std::string>& indicator_names();

struct IndicatorConfig {
    int glcm_levels = 32;
    bool resize = true;
    int resize_side = 224;
};

struct SpectralStats {
    double mean = 0.0;
    double stddev = 0.0;
    double skewness = 0.0;
};

struct TexturalFeatures {
    double average = 0.0;       // sum average over antidiagonals, 1-based levels
    double variance = 0.0;      // squared deviation from the marginal mean
    double homogeneity = 0.0;   // inverse difference moment
    double contrast = 0.0;
    double dissimilarity = 0.0;
    double entropy = 0.0;       // natural log, 0 * ln 0 := 0
    double second_moment = 0.0; // angular second moment / energy
    double correlation = 0.0;   // 0 when either marginal deviation is 0

    std::array<double, 8> as_array() const {
        return {average,       variance, homogeneity,   contrast,
                dissimilarity, entropy,  second_moment, correlation};
    }
};

struct IndicatorVector {
    std::array<double, kIndicatorCount> values{};
};

/// Population mean / std / skewness of one channel; skewness is 0 when the
/// channel is constant.
SpectralStats spectral_stats(const ImageRgb& img, int channel);

/// Five equal-width bins over [0,255], returned as fractions of the pixel
/// count (bin = min(floor(v*5/256), 4)).
std::array<double, 5> histogram5(const ImageRgb& img, int channel);

double channel_difference(const ImageRgb& img, int c1, int c2);

/// Ratio of channel means; 0 by convention when the denominator mean is 0.
double channel_ratio(const ImageRgb& img, int c1, int c2);

TexturalFeatures textural_features(const Glcm& g);

/// Assemble all 54 indicators in canonical order. When config.resize is set
/// the image is first resampled to config.resize_side so feature scales do
/// not depend on the source resolution.
IndicatorVector extract_indicators(const ImageRgb& img, const IndicatorConfig& config = {});

} // namespace statfuse

#endif
