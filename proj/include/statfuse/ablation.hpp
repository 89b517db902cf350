#ifndef STATFUSE_ABLATION_HPP
#define STATFUSE_ABLATION_HPP

#include "statfuse/fusion.hpp"

#include <string>
#include <vector>

namespace statfuse {

/// A named group of indicator columns that is removed as a unit in the
/// ablation protocol (e.g. "tex_contrast" covers the R, G and B columns).
struct IndicatorFamily {
    std::string name;
    std::vector<int> columns; // indices into the 54-feature vector
};

/// The canonical family partition of the 54 columns. granularity "coarse"
/// groups all 15 histogram columns into one family; "per_bin" keeps five
/// hist_bin_k families of three columns each.
std::vector<IndicatorFamily> indicator_families(const std::string& granularity = "coarse");

/// Families must be disjoint and cover every column exactly once.
void validate_family_partition(const std::vector<IndicatorFamily>& families, int total_columns);

const IndicatorFamily& find_family(const std::vector<IndicatorFamily>& families,
                                   const std::string& name);

/// Per-method weighted-precision delta of one family ablation:
/// delta = ablated mean - baseline mean, so negative means the family helped.
struct AblationDelta {
    std::string family;
    std::vector<std::pair<std::string, double>> method_deltas;
};

/// Retrain feature classifier and fusion without the family columns and diff
/// against the supplied baseline (which must come from the same dataset,
/// config and seed list).
AblationDelta ablate(const LabeledDataset& ds, const CnnProbabilityTable& cnn,
                     const EvaluationReport& baseline, const IndicatorFamily& family,
                     const RunConfig& cfg);

struct AblationResult {
    EvaluationReport baseline;
    std::vector<std::string> methods;  // column order
    std::vector<AblationDelta> rows;   // canonical family order
};

AblationResult ablation_matrix(const LabeledDataset& ds, const CnnProbabilityTable& cnn,
                               const RunConfig& cfg);

/// CSV grid: rows = families, columns = methods, cells = delta in
/// percentage points with 2 decimals.
std::string ablation_csv(const AblationResult& result);

} // namespace statfuse

#endif
