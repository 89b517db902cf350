#ifndef STATFUSE_GLCM_HPP
#define STATFUSE_GLCM_HPP

#include "statfuse/image.hpp"

#include <cstdint>
#include <vector>

namespace statfuse {

/// Quantized grey-level grid. Unlike ImageRgb it only needs one horizontal
/// pixel pair, so a single row of width >= 2 is valid.
struct GreyGrid {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> levels; // row-major, values in [0, level_count)

    std::uint8_t at(int row, int col) const {
        return levels[static_cast<std::size_t>(row) * width + col];
    }
};

/// Normalized symmetric grey-level co-occurrence matrix with its marginals.
/// Marginal moments use the level indices 0..levels-1 as values; the
/// textural formulas that need 1-based values shift them on the fly.
struct Glcm {
    int levels = 0;
    std::vector<double> p; // levels x levels, row-major, sums to 1
    std::vector<double> marginal_x;
    std::vector<double> marginal_y;
    double mu_x = 0.0;
    double mu_y = 0.0;
    double sigma_x = 0.0;
    double sigma_y = 0.0;

    double at(int a, int b) const { return p[static_cast<std::size_t>(a) * levels + b]; }

    /// Rebuild marginals and moments for an externally supplied probability
    /// matrix (used by the bindings). Validates shape and normalization.
    static Glcm from_probabilities(std::vector<double> probs, int levels);
};

/// level = floor(pixel * levels / 256), for 2 <= levels <= 256.
GreyGrid quantize_channel(const ImageRgb& img, int channel, int levels);

/// Count horizontally adjacent ordered pairs at distance 1, symmetrize the
/// counts as C + C^T, normalize to sum 1 and derive the marginal moments.
Glcm build_glcm(const GreyGrid& grid, int levels);

} // namespace statfuse

#endif
