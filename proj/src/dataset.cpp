#include "statfuse/dataset.hpp"
#include "statfuse/error.hpp"
#include "statfuse/io.hpp"
#include "statfuse/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace statfuse {

std::string split_name(Split s) {
    switch (s) {
    case Split::train: return "train";
    case Split::valid: return "valid";
    case Split::test: return "test";
    }
    return "?";
}

Split parse_split(const std::string& name) {
    if (name == "train") return Split::train;
    if (name == "valid") return Split::valid;
    if (name == "test") return Split::test;
    throw InputError("BadSplit", "unknown split tag: " + name);
}

bool DatasetManifest::has_splits() const {
    return !entries.empty() &&
           std::all_of(entries.begin(), entries.end(),
                       [](const ManifestEntry& e) { return e.split.has_value(); });
}

int DatasetManifest::label_index(const std::string& label) const {
    for (std::size_t i = 0; i < label_names.size(); ++i) {
        if (label_names[i] == label) return static_cast<int>(i);
    }
    return -1;
}

DatasetManifest make_manifest(std::vector<ManifestEntry> entries) {
    DatasetManifest m;
    std::set<std::string> seen;
    for (auto& e : entries) {
        if (!seen.insert(e.image_id).second) {
            throw InputError("DuplicateImageId", "duplicate image_id: " + e.image_id);
        }
        if (m.label_index(e.label) < 0) m.label_names.push_back(e.label);
    }
    m.entries = std::move(entries);
    return m;
}

DatasetManifest load_manifest(const std::string& path) {
    const auto rows = parse_csv(read_file(path));
    if (rows.empty()) throw InputError("EmptyInput", "manifest has no rows: " + path);
    const auto& header = rows.front();
    if (header.size() < 3 || header[0] != "image_id" || header[1] != "path" ||
        header[2] != "label" || (header.size() == 4 && header[3] != "split") ||
        header.size() > 4) {
        throw InputError("BadManifest", "expected header image_id,path,label[,split]");
    }
    const bool with_split = header.size() == 4;
    std::vector<ManifestEntry> entries;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != header.size()) {
            throw InputError("BadManifest",
                             "row " + std::to_string(i) + " has wrong field count");
        }
        ManifestEntry e{r[0], r[1], r[2], std::nullopt};
        if (with_split) e.split = parse_split(r[3]);
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw InputError("EmptyInput", "manifest has no entries: " + path);
    return make_manifest(std::move(entries));
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    std::ostringstream out;
    const bool with_split = manifest.has_splits();
    out << "image_id,path,label" << (with_split ? ",split" : "") << "\n";
    for (const auto& e : manifest.entries) {
        for (const std::string* field : {&e.image_id, &e.path, &e.label}) {
            if (field->find(',') != std::string::npos) {
                throw InputError("BadManifest", "field contains a comma: " + *field);
            }
        }
        out << e.image_id << ',' << e.path << ',' << e.label;
        if (with_split) out << ',' << split_name(*e.split);
        out << "\n";
    }
    atomic_write_file(path, out.str());
}

DatasetManifest auto_split(const DatasetManifest& manifest, std::array<double, 3> ratios,
                           std::uint64_t seed) {
    const double total = ratios[0] + ratios[1] + ratios[2];
    if (std::abs(total - 1.0) > 1e-9 || ratios[0] < 0 || ratios[1] < 0 || ratios[2] < 0) {
        throw InputError("BadConfig", "split ratios must be non-negative and sum to 1");
    }

    DatasetManifest out = manifest;
    DeterministicRng rng(seed);
    for (std::size_t li = 0; li < manifest.label_names.size(); ++li) {
        std::vector<int> members;
        for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
            if (manifest.entries[i].label == manifest.label_names[li]) {
                members.push_back(static_cast<int>(i));
            }
        }
        const int n = static_cast<int>(members.size());
        auto take = [n](double ratio) {
            if (ratio <= 0.0) return 0;
            return std::max(1, static_cast<int>(std::floor(n * ratio)));
        };
        const int n_valid = take(ratios[1]);
        const int n_test = take(ratios[2]);
        const int n_train = n - n_valid - n_test;
        if (n_train < 1) {
            throw InputError("ClassTooSmall",
                             "label '" + manifest.label_names[li] + "' has only " +
                                 std::to_string(n) + " instances; cannot populate all splits");
        }
        rng.shuffle(members);
        for (int i = 0; i < n; ++i) {
            Split s = i < n_train           ? Split::train
                      : i < n_train + n_valid ? Split::valid
                                              : Split::test;
            out.entries[members[i]].split = s;
        }
    }
    return out;
}

FeatureTable load_features_csv(const std::string& path) {
    const auto rows = parse_csv(read_file(path));
    if (rows.size() < 2) throw InputError("EmptyInput", "features CSV has no data rows: " + path);
    const auto& header = rows.front();
    if (header.size() < 3 || header[0] != "image_id" || header[1] != "label") {
        throw InputError("BadFeaturesCsv", "expected header image_id,label,<features>");
    }

    FeatureTable t;
    t.feature_names.assign(header.begin() + 2, header.end());
    const int d = static_cast<int>(t.feature_names.size());
    const int n = static_cast<int>(rows.size()) - 1;
    t.X.resize(n, d);
    for (int i = 0; i < n; ++i) {
        const auto& r = rows[i + 1];
        if (static_cast<int>(r.size()) != d + 2) {
            throw InputError("BadFeaturesCsv",
                             "row " + std::to_string(i + 1) + " has wrong field count");
        }
        t.ids.push_back(r[0]);
        t.labels.push_back(r[1]);
        for (int j = 0; j < d; ++j) {
            try {
                t.X(i, j) = std::stod(r[j + 2]);
            } catch (const std::exception&) {
                throw InputError("BadFeaturesCsv", "non-numeric feature value: " + r[j + 2]);
            }
        }
    }
    return t;
}

std::string features_csv_to_string(const FeatureTable& table) {
    std::ostringstream out;
    out << "image_id,label";
    for (const auto& name : table.feature_names) out << ',' << name;
    out << "\n";
    for (Eigen::Index i = 0; i < table.X.rows(); ++i) {
        out << table.ids[i] << ',' << table.labels[i];
        for (Eigen::Index j = 0; j < table.X.cols(); ++j) {
            out << ',' << format_double(table.X(i, j));
        }
        out << "\n";
    }
    return out.str();
}

void save_features_csv(const FeatureTable& table, const std::string& path) {
    atomic_write_file(path, features_csv_to_string(table));
}

std::vector<int> LabeledDataset::rows_in(Split s) const {
    std::vector<int> idx;
    for (std::size_t i = 0; i < split.size(); ++i) {
        if (split[i] == s) idx.push_back(static_cast<int>(i));
    }
    return idx;
}

Eigen::MatrixXd LabeledDataset::rows(const std::vector<int>& idx) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), X.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(idx[i]);
    return out;
}

std::vector<int> LabeledDataset::labels_at(const std::vector<int>& idx) const {
    std::vector<int> out;
    out.reserve(idx.size());
    for (int i : idx) out.push_back(y[i]);
    return out;
}

LabeledDataset LabeledDataset::with_columns(const std::vector<int>& columns) const {
    LabeledDataset out = *this;
    out.X.resize(X.rows(), static_cast<Eigen::Index>(columns.size()));
    out.feature_names.clear();
    for (std::size_t j = 0; j < columns.size(); ++j) {
        out.X.col(static_cast<Eigen::Index>(j)) = X.col(columns[j]);
        out.feature_names.push_back(feature_names[columns[j]]);
    }
    return out;
}

LabeledDataset join_dataset(const DatasetManifest& manifest, const FeatureTable& features) {
    if (!manifest.has_splits()) {
        throw InputError("BadManifest", "manifest has no split assignments; run auto_split");
    }
    std::map<std::string, int> feature_row;
    for (std::size_t i = 0; i < features.ids.size(); ++i) {
        feature_row[features.ids[i]] = static_cast<int>(i);
    }

    LabeledDataset ds;
    ds.label_names = manifest.label_names;
    ds.feature_names = features.feature_names;
    ds.X.resize(static_cast<Eigen::Index>(manifest.entries.size()), features.X.cols());
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        const auto& e = manifest.entries[i];
        auto it = feature_row.find(e.image_id);
        if (it == feature_row.end()) {
            missing.push_back(e.image_id);
            continue;
        }
        if (features.labels[it->second] != e.label) {
            throw InputError("BadFeaturesCsv",
                             "label mismatch for image_id " + e.image_id);
        }
        ds.X.row(static_cast<Eigen::Index>(i)) = features.X.row(it->second);
        ds.y.push_back(manifest.label_index(e.label));
        ds.split.push_back(*e.split);
        ds.ids.push_back(e.image_id);
    }
    if (!missing.empty()) {
        std::string list;
        for (std::size_t i = 0; i < missing.size() && i < 5; ++i) {
            list += (i ? ", " : "") + missing[i];
        }
        throw InputError("MissingFeatures", "no feature rows for image_ids: " + list);
    }
    return ds;
}

} // namespace statfuse
