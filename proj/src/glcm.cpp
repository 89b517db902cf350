#include "statfuse/glcm.hpp"
#include "statfuse/error.hpp"

#include <cmath>
#include <cstdint>
#include <string>

namespace statfuse {

namespace {

void compute_marginals(Glcm& g) {
    const int z = g.levels;
    g.marginal_x.assign(z, 0.0);
    g.marginal_y.assign(z, 0.0);
    for (int a = 0; a < z; ++a) {
        for (int b = 0; b < z; ++b) {
            const double v = g.at(a, b);
            g.marginal_x[a] += v;
            g.marginal_y[b] += v;
        }
    }
    double mx = 0.0, my = 0.0;
    for (int a = 0; a < z; ++a) {
        mx += a * g.marginal_x[a];
        my += a * g.marginal_y[a];
    }
    g.mu_x = mx;
    g.mu_y = my;
    double vx = 0.0, vy = 0.0;
    for (int a = 0; a < z; ++a) {
        vx += (a - mx) * (a - mx) * g.marginal_x[a];
        vy += (a - my) * (a - my) * g.marginal_y[a];
    }
    g.sigma_x = std::sqrt(vx);
    g.sigma_y = std::sqrt(vy);
}

} // namespace

Glcm Glcm::from_probabilities(std::vector<double> probs, int levels) {
    if (levels < 2 || levels > 256) {
        throw InputError("BadLevelCount", "grey level count must be in [2, 256]");
    }
    if (probs.size() != static_cast<std::size_t>(levels) * levels) {
        throw InputError("DimensionMismatch", "probability matrix is not levels x levels");
    }
    double total = 0.0;
    for (double v : probs) {
        if (v < 0.0) throw InputError("InvalidProbabilityRow", "negative GLCM entry");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-6) {
        throw InputError("InvalidProbabilityRow", "GLCM entries must sum to 1");
    }
    Glcm g;
    g.levels = levels;
    g.p = std::move(probs);
    compute_marginals(g);
    return g;
}

GreyGrid quantize_channel(const ImageRgb& img, int channel, int levels) {
    if (channel < 0 || channel > 2) {
        throw InputError("BadChannelIndex", "channel must be 0, 1 or 2");
    }
    if (levels < 2 || levels > 256) {
        throw InputError("BadLevelCount", "grey level count must be in [2, 256]");
    }
    GreyGrid grid;
    grid.width = img.width;
    grid.height = img.height;
    grid.levels.resize(img.pixel_count());
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            grid.levels[static_cast<std::size_t>(r) * img.width + c] =
                static_cast<std::uint8_t>(img.at(r, c, channel) * levels / 256);
        }
    }
    return grid;
}

Glcm build_glcm(const GreyGrid& grid, int levels) {
    if (levels < 2 || levels > 256) {
        throw InputError("BadLevelCount", "grey level count must be in [2, 256]");
    }
    if (grid.width < 2 || grid.height < 1) {
        throw InputError("DegenerateSize", "grid needs at least one horizontal pixel pair");
    }

    const int z = levels;
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(z) * z, 0);
    for (int r = 0; r < grid.height; ++r) {
        for (int c = 0; c + 1 < grid.width; ++c) {
            const int a = grid.at(r, c);
            const int b = grid.at(r, c + 1);
            if (a >= z || b >= z) {
                throw InputError("BadLevelCount", "grid level exceeds the declared count");
            }
            counts[static_cast<std::size_t>(a) * z + b] += 1;
        }
    }

    // Symmetrize in integer space so p(a,b) == p(b,a) holds exactly.
    std::uint64_t total = 0;
    std::vector<std::uint64_t> sym(static_cast<std::size_t>(z) * z, 0);
    for (int a = 0; a < z; ++a) {
        for (int b = 0; b < z; ++b) {
            sym[static_cast<std::size_t>(a) * z + b] =
                counts[static_cast<std::size_t>(a) * z + b] +
                counts[static_cast<std::size_t>(b) * z + a];
            total += sym[static_cast<std::size_t>(a) * z + b];
        }
    }

    Glcm g;
    g.levels = z;
    g.p.resize(sym.size());
    for (std::size_t i = 0; i < sym.size(); ++i) {
        g.p[i] = static_cast<double>(sym[i]) / static_cast<double>(total);
    }
    compute_marginals(g);
    return g;
}

} // namespace statfuse
