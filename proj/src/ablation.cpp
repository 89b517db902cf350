#include "statfuse/ablation.hpp"
#include "statfuse/error.hpp"
#include "statfuse/indicators.hpp"

#include <cstdio>
#include <set>
#include <sstream>

namespace statfuse {

std::vector<IndicatorFamily> indicator_families(const std::string& granularity) {
    if (granularity != "coarse" && granularity != "per_bin") {
        throw InputError("BadConfig", "histogram granularity must be 'coarse' or 'per_bin'");
    }
    const auto& names = indicator_names();

    std::vector<std::string> family_order = {"mean", "std", "skewness"};
    if (granularity == "coarse") {
        family_order.push_back("histogram");
    } else {
        for (int b = 1; b <= 5; ++b) family_order.push_back("hist_bin_" + std::to_string(b));
    }
    for (const char* f : {"difference", "ratio", "tex_average", "tex_variance",
                          "tex_homogeneity", "tex_contrast", "tex_dissimilarity", "tex_entropy",
                          "tex_second_moment", "tex_correlation"}) {
        family_order.push_back(f);
    }

    auto family_of = [&](const std::string& column) -> std::string {
        if (column.rfind("hist_bin_", 0) == 0) {
            return granularity == "coarse" ? "histogram" : column.substr(0, column.size() - 2);
        }
        if (column.rfind("diff_", 0) == 0) return "difference";
        if (column.rfind("ratio_", 0) == 0) return "ratio";
        return column.substr(0, column.size() - 2); // strip channel suffix
    };

    std::vector<IndicatorFamily> families;
    for (const auto& fname : family_order) {
        IndicatorFamily fam{fname, {}};
        for (std::size_t col = 0; col < names.size(); ++col) {
            if (family_of(names[col]) == fname) fam.columns.push_back(static_cast<int>(col));
        }
        families.push_back(std::move(fam));
    }
    validate_family_partition(families, kIndicatorCount);
    return families;
}

void validate_family_partition(const std::vector<IndicatorFamily>& families, int total_columns) {
    std::set<int> seen;
    for (const auto& fam : families) {
        if (fam.columns.empty()) {
            throw InputError("UnknownFamily", "family '" + fam.name + "' has no columns");
        }
        for (int c : fam.columns) {
            if (c < 0 || c >= total_columns) {
                throw InputError("UnknownFamily",
                                 "family '" + fam.name + "' references column " +
                                     std::to_string(c) + " outside [0, " +
                                     std::to_string(total_columns) + ")");
            }
            if (!seen.insert(c).second) {
                throw InputError("UnknownFamily",
                                 "column " + std::to_string(c) + " appears in two families");
            }
        }
    }
    if (static_cast<int>(seen.size()) != total_columns) {
        throw InputError("UnknownFamily", "families do not cover all columns");
    }
}

const IndicatorFamily& find_family(const std::vector<IndicatorFamily>& families,
                                   const std::string& name) {
    for (const auto& fam : families) {
        if (fam.name == name) return fam;
    }
    throw InputError("UnknownFamily", "no indicator family named '" + name + "'");
}

namespace {

std::vector<int> complement_columns(const IndicatorFamily& family, int total) {
    std::set<int> removed(family.columns.begin(), family.columns.end());
    std::vector<int> keep;
    for (int c = 0; c < total; ++c) {
        if (!removed.count(c)) keep.push_back(c);
    }
    if (keep.empty()) {
        throw InputError("UnknownFamily",
                         "removing family '" + family.name + "' would leave no columns");
    }
    return keep;
}

std::vector<std::string> delta_methods(const EvaluationReport& report) {
    std::vector<std::string> methods;
    for (const auto& [name, result] : report.methods) {
        if (name != "cnn_alone") methods.push_back(name); // cnn_alone cannot move
    }
    return methods;
}

} // namespace

AblationDelta ablate(const LabeledDataset& ds, const CnnProbabilityTable& cnn,
                     const EvaluationReport& baseline, const IndicatorFamily& family,
                     const RunConfig& cfg) {
    for (int c : family.columns) {
        if (c < 0 || c >= ds.X.cols()) {
            throw InputError("UnknownFamily",
                             "family '" + family.name + "' does not fit the dataset");
        }
    }
    const LabeledDataset reduced =
        ds.with_columns(complement_columns(family, static_cast<int>(ds.X.cols())));
    const EvaluationReport ablated = evaluate(reduced, cnn, cfg);

    AblationDelta delta;
    delta.family = family.name;
    for (const std::string& method : delta_methods(baseline)) {
        const MethodResult* base = baseline.find(method);
        const MethodResult* after = ablated.find(method);
        if (!base || !after) {
            throw InputError("BadConfig", "baseline and ablated reports disagree on methods");
        }
        delta.method_deltas.emplace_back(
            method, after->mean_weighted_precision - base->mean_weighted_precision);
    }
    return delta;
}

AblationResult ablation_matrix(const LabeledDataset& ds, const CnnProbabilityTable& cnn,
                               const RunConfig& cfg) {
    cfg.validate();
    const auto families = indicator_families(cfg.histogram_granularity);
    if (ds.X.cols() != kIndicatorCount) {
        throw InputError("UnknownFamily",
                         "ablation matrix expects the full 54-column indicator layout");
    }

    AblationResult result;
    result.baseline = evaluate(ds, cnn, cfg);
    result.methods = delta_methods(result.baseline);
    for (const auto& family : families) {
        result.rows.push_back(ablate(ds, cnn, result.baseline, family, cfg));
    }
    return result;
}

std::string ablation_csv(const AblationResult& result) {
    std::ostringstream out;
    out << "family";
    for (const auto& m : result.methods) out << ',' << m;
    out << "\n";
    for (const auto& row : result.rows) {
        out << row.family;
        for (const auto& [method, delta] : row.method_deltas) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.2f", delta * 100.0); // percentage points
            out << ',' << buf;
        }
        out << "\n";
    }
    return out.str();
}

} // namespace statfuse
