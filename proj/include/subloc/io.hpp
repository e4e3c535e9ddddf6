#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "subloc/core.hpp"
#include "subloc/positioning.hpp"
#include "subloc/rfm.hpp"

namespace subloc {

// Fingerprint log: one record per line,
//
//   x,y key:value key:value ...
//
// position in meters, keys unsigned 64-bit integers, values finite reals.
// Blank lines and lines starting with '#' are skipped.

std::vector<ReferenceRecord> read_fingerprint_log(std::istream& in);
std::vector<ReferenceRecord> read_fingerprint_log(const std::filesystem::path& path);

void write_fingerprint_log(std::ostream& out, const std::vector<ReferenceRecord>& records);
void write_fingerprint_log(const std::filesystem::path& path, const std::vector<ReferenceRecord>& records);

/// Parses a survey log into a RawRFM whose bounds are the record bounding box.
/// Throws subloc::Error("no reference data") when the log has no records.
RawRFM ingest(std::istream& in);
RawRFM ingest(const std::filesystem::path& path);

/// Polygon file: one "x,y" vertex per line.
Polygon read_polygon(const std::filesystem::path& path);

// Binary containers. Little-endian, IEEE-754 doubles stored bit-exactly, so
// write→read→write reproduces the same bytes.

void write_rfm(std::ostream& out, const GriddedRFM& rfm);
GriddedRFM read_rfm(std::istream& in);
void write_rfm(const std::filesystem::path& path, const GriddedRFM& rfm);
GriddedRFM read_rfm(const std::filesystem::path& path);

void write_cache(std::ostream& out, const PrecomputedCache& cache);
/// Throws subloc::Error on a bad magic or a format version other than
/// PrecomputedCache::kFormatVersion.
PrecomputedCache read_cache(std::istream& in);
void write_cache(const std::filesystem::path& path, const PrecomputedCache& cache);
PrecomputedCache read_cache(const std::filesystem::path& path);

}  // namespace subloc
