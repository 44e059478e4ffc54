#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdfront/asymptotics.hpp"

namespace rdfront {

inline constexpr const char* kCodeVersion = "0.4.0";
inline constexpr int kArchiveVersion = 1;

/// Shortest decimal that reads back to the same binary64.
std::string format_double(double v);

/// A named table. Columns carry their unit in brackets, e.g. "t[nondim]".
struct CsvBlock {
    std::string kind;  ///< free tag written in the block line
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string to_csv(const CsvBlock& b);

/// Profiles (any subset, in stage order) plus cached stage results.
///
/// File layout: one line of JSON (schema, version, code version, n, solver
/// settings, scalar solver output, stage fingerprints), then blocks
///   #block <name> kind=<k> rows=<r>
///   <csv header>
///   <rows>
/// and a closing "#eof" line.
struct ProfileArchive {
    int n = 0;
    nlohmann::json config = nlohmann::json::object();
    std::optional<EtaSolution> eta;
    std::optional<Mu2Solution> mu2;
    std::optional<Phi2Solution> phi2;
    std::map<std::string, std::string> stages;  ///< stage name -> input fingerprint
    std::map<std::string, CsvBlock> results;
};

std::string serialize_archive(const ProfileArchive& a);

/// expected_n = 0 accepts any n. Throws ArchiveError (with the byte offset for
/// malformed text) or ConfigError for a mismatched n.
ProfileArchive parse_archive(const std::string& text, int expected_n = 0);

void write_archive(const ProfileArchive& a, const std::string& path);
ProfileArchive read_archive(const std::string& path, int expected_n = 0);

/// Requires all three profiles; re-checks the bundle invariants.
AsymptoticBundle bundle_from(const ProfileArchive& a);
ProfileArchive archive_from(const AsymptoticBundle& b);

void save_archive(const AsymptoticBundle& b, const std::string& path);
AsymptoticBundle load_archive(const std::string& path, int expected_n = 0);

}  // namespace rdfront
