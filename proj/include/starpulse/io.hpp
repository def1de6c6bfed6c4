#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "starpulse/evolution.hpp"
#include "starpulse/spectral.hpp"
#include "starpulse/validation.hpp"

namespace starpulse::io {

using json = nlohmann::json;

/// Round-trip representation for machine-readable files.
std::string exact(double v);
/// Six significant digits for human summaries.
std::string brief(double v);

/// Writes to a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

json to_json(const ExperimentReport& rep);
std::string to_csv(const ExperimentReport& rep);
/// Writes DIR/<name>.json and DIR/<name>.csv; returns both paths.
std::vector<std::filesystem::path> write_report(const ExperimentReport& rep, const std::filesystem::path& dir);

/// Mode table with samples of each eigenfunction at `x`.
json modes_to_json(const GasParams& params, int basis_size, const std::vector<EigenMode>& modes,
                   const Eigen::VectorXd& x);
/// Columns n, lambda, lambda_phys, then one column per sample point.
std::string modes_csv(const json& table);

/// Columns t, R_F, y_center, y_surface, energy.
std::string trajectory_csv(const Trajectory& traj);
json snapshots_to_json(const Trajectory& traj, const Eigen::VectorXd& x);

/// Two whitespace-separated columns (x, value); '#' starts a comment.
std::pair<Eigen::VectorXd, Eigen::VectorXd> read_samples(const std::filesystem::path& path);

/// 64-bit FNV-1a of a string, as 16 hex digits.
std::string fnv1a_hex(const std::string& data);

/// JSON artifacts keyed by a content hash of (schema version, parameters).
class ResultCache {
 public:
  /// Directory from STARPULSE_CACHE, else ".starpulse-cache" in the working directory.
  static std::filesystem::path default_dir();

  ResultCache(std::filesystem::path dir, std::string schema);
  const std::filesystem::path& dir() const { return dir_; }
  const std::string& schema() const { return schema_; }

  std::string key(const json& params) const;
  std::filesystem::path path_for(const std::string& key) const;

  /// Stored payload, or nullopt when absent. Throws CacheCorrupt for files
  /// that fail to parse or carry another schema or key.
  std::optional<json> load(const std::string& key) const;
  void store(const std::string& key, const json& payload) const;

  struct Lookup {
    json payload;
    bool hit = false;
    std::string warning;  ///< non-empty when a corrupt entry was replaced
  };
  /// Cached payload or the producer's result, which is then stored.
  Lookup get_or_produce(const json& params, const std::function<json()>& producer) const;

 private:
  std::filesystem::path dir_;
  std::string schema_;
};

}  // namespace starpulse::io
