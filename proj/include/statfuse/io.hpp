#ifndef STATFUSE_IO_HPP
#define STATFUSE_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace statfuse {

/// Write via a temp file in the target directory plus atomic rename, so a
/// failed run never leaves a partial output in place.
void atomic_write_file(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);

/// Fixed 17-significant-digit formatting; round-trips IEEE doubles exactly,
/// which makes byte-identity of emitted CSVs a meaningful determinism check.
std::string format_double(double v);

std::uint64_t fnv1a64(const std::string& bytes);

/// FNV-1a over the concatenated contents of the given files, as a hex string.
std::string content_hash(const std::vector<std::string>& paths);

/// Minimal CSV: comma separation, no quoting (image ids, labels and feature
/// names must not contain commas; enforced at write time).
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

} // namespace statfuse

#endif
