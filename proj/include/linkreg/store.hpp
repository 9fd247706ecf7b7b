#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "linkreg/dataset.hpp"
#include "linkreg/ingestion.hpp"
#include "linkreg/types.hpp"

namespace linkreg {

/// 64-bit FNV-1a of `text`, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

/// First 12 hex digits of the hash of `seed` followed by `content`.
std::string content_id(std::string_view seed, std::string_view content);

/// On-disk dataset / model store:
///   <root>/datasets/<id>/manifest.json + the referenced CSV / GeoJSON files
///   <root>/models/<id>/model.json + meta.json
/// Ids are content hashes, so storing the same inputs twice yields the same
/// id. Writers to one dataset are serialized; readers share a lock.
class Store {
 public:
  explicit Store(std::filesystem::path root, std::string id_seed = {});

  const std::filesystem::path& root() const { return root_; }

  /// Validates and stores. `files` maps each manifest file reference to its
  /// contents. Returns the dataset id.
  std::string put_dataset(const Manifest& manifest, const std::map<std::string, std::string>& files);

  /// Reads a manifest and its files from a local directory.
  std::string import_dataset(const std::filesystem::path& manifest_path);

  bool has_dataset(const std::string& id) const;
  std::shared_ptr<const Dataset> dataset(const std::string& id) const;
  Manifest manifest(const std::string& id) const;

  /// Extracts and attaches temporal features; persisted in the manifest so a
  /// reload reproduces them.
  std::vector<TemporalFeature> add_features(const std::string& id, const std::vector<TemporalRequest>& requests);

  struct ModelMeta {
    std::string dataset_id;
  };

  std::string put_model(const FittedModel& model, const ModelMeta& meta);
  bool has_model(const std::string& id) const;
  FittedModel model(const std::string& id) const;
  ModelMeta model_meta(const std::string& id) const;

  std::vector<std::string> dataset_ids() const;
  std::vector<std::string> model_ids() const;

 private:
  std::filesystem::path dataset_dir(const std::string& id) const;
  std::filesystem::path model_dir(const std::string& id) const;
  std::shared_mutex& lock_for(const std::string& id) const;
  // Caller holds the dataset's lock.
  std::shared_ptr<const Dataset> cached_or_load(const std::string& id) const;

  std::filesystem::path root_;
  std::string id_seed_;
  mutable std::mutex registry_mutex_;
  mutable std::map<std::string, std::unique_ptr<std::shared_mutex>> locks_;
  mutable std::map<std::string, std::shared_ptr<const Dataset>> cache_;
};

}  // namespace linkreg
