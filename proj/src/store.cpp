#include "linkreg/store.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>

#include "linkreg/error.hpp"
#include "linkreg/model_io.hpp"
#include "linkreg/serialize.hpp"

namespace linkreg {

namespace fs = std::filesystem;

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string content_id(std::string_view seed, std::string_view content) {
  std::string joined(seed);
  joined.push_back('\0');
  joined.append(content);
  return fnv1a_hex(joined).substr(0, 12);
}

namespace {

bool valid_id(const std::string& id) {
  if (id.size() != 12) return false;
  for (char c : id) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

void write_file(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out << text;
    if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

// Manifest file references become plain file names inside the store.
std::string stored_name(const std::string& ref) { return fs::path(ref).filename().string(); }

}  // namespace

Store::Store(fs::path root, std::string id_seed) : root_(std::move(root)), id_seed_(std::move(id_seed)) {
  std::error_code ec;
  if (fs::exists(root_, ec) && !fs::is_directory(root_, ec)) {
    throw Error(ErrorCode::Io, root_.string() + " exists and is not a directory");
  }
  fs::create_directories(root_ / "datasets", ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create store at " + root_.string() + ": " + ec.message());
  fs::create_directories(root_ / "models", ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create store at " + root_.string() + ": " + ec.message());
}

fs::path Store::dataset_dir(const std::string& id) const { return root_ / "datasets" / id; }
fs::path Store::model_dir(const std::string& id) const { return root_ / "models" / id; }

std::shared_mutex& Store::lock_for(const std::string& id) const {
  std::lock_guard guard(registry_mutex_);
  auto& slot = locks_[id];
  if (!slot) slot = std::make_unique<std::shared_mutex>();
  return *slot;
}

std::string Store::put_dataset(const Manifest& manifest, const std::map<std::string, std::string>& files) {
  Dataset dataset = build_dataset(manifest, [&](const std::string& ref) -> std::optional<std::string> {
    auto it = files.find(ref);
    if (it == files.end()) return std::nullopt;
    return it->second;
  });

  Manifest stored = manifest;
  std::string digest = manifest_to_json(manifest);
  for (auto& link : stored.links) {
    digest += "\n" + link.name + "\n" + files.at(link.series);
    link.series = stored_name(link.series);
    if (link.waypoints) {
      digest += "\n" + files.at(*link.waypoints);
      link.waypoints = stored_name(*link.waypoints);
    }
  }
  const std::string id = content_id(id_seed_, digest);

  std::unique_lock lock(lock_for(id));
  const fs::path dir = dataset_dir(id);
  // Same content, same id: keep the stored copy and any features added since.
  if (fs::is_regular_file(dir / "manifest.json")) return id;
  fs::create_directories(dir);
  for (std::size_t i = 0; i < manifest.links.size(); ++i) {
    write_file(dir / stored.links[i].series, files.at(manifest.links[i].series));
    if (manifest.links[i].waypoints) write_file(dir / *stored.links[i].waypoints, files.at(*manifest.links[i].waypoints));
  }
  write_file(dir / "manifest.json", manifest_to_json(stored));
  {
    std::lock_guard guard(registry_mutex_);
    cache_[id] = std::make_shared<const Dataset>(std::move(dataset));
  }
  return id;
}

std::string Store::import_dataset(const fs::path& manifest_path) {
  const Manifest manifest = parse_manifest(read_text_file(manifest_path));
  std::map<std::string, std::string> files;
  const fs::path base = manifest_path.parent_path();
  for (const auto& link : manifest.links) {
    for (const std::optional<std::string>& ref : {std::optional<std::string>(link.series), link.waypoints}) {
      if (!ref) continue;
      const fs::path p = base / *ref;
      if (!fs::is_regular_file(p)) throw Error(ErrorCode::Io, "missing file " + p.string() + " for " + link.name);
      files[*ref] = read_text_file(p);
    }
  }
  return put_dataset(manifest, files);
}

bool Store::has_dataset(const std::string& id) const {
  return valid_id(id) && fs::is_regular_file(dataset_dir(id) / "manifest.json");
}

std::shared_ptr<const Dataset> Store::cached_or_load(const std::string& id) const {
  {
    std::lock_guard guard(registry_mutex_);
    auto it = cache_.find(id);
    if (it != cache_.end()) return it->second;
  }
  auto loaded = std::make_shared<const Dataset>(load_dataset(dataset_dir(id) / "manifest.json"));
  std::lock_guard guard(registry_mutex_);
  auto [it, inserted] = cache_.emplace(id, loaded);
  return it->second;
}

std::shared_ptr<const Dataset> Store::dataset(const std::string& id) const {
  if (!has_dataset(id)) throw Error(ErrorCode::UnknownDataset, "dataset " + id);
  std::shared_lock lock(lock_for(id));
  return cached_or_load(id);
}

Manifest Store::manifest(const std::string& id) const {
  if (!has_dataset(id)) throw Error(ErrorCode::UnknownDataset, "dataset " + id);
  std::shared_lock lock(lock_for(id));
  return parse_manifest(read_text_file(dataset_dir(id) / "manifest.json"));
}

std::vector<TemporalFeature> Store::add_features(const std::string& id, const std::vector<TemporalRequest>& requests) {
  if (!has_dataset(id)) throw Error(ErrorCode::UnknownDataset, "dataset " + id);
  std::unique_lock lock(lock_for(id));
  Dataset updated = *cached_or_load(id);
  Manifest manifest = parse_manifest(read_text_file(dataset_dir(id) / "manifest.json"));

  std::vector<TemporalFeature> added;
  for (const TemporalRequest& request : requests) {
    added.push_back(attach_temporal(updated, request));
    TemporalRequest named = request;
    if (named.name.empty()) named.name = default_feature_name(request.kind);
    auto same = std::find_if(manifest.temporal.begin(), manifest.temporal.end(), [&](const TemporalRequest& r) {
      return (r.name.empty() ? default_feature_name(r.kind) : r.name) == named.name;
    });
    if (same != manifest.temporal.end()) {
      *same = named;
    } else {
      manifest.temporal.push_back(named);
    }
  }
  write_file(dataset_dir(id) / "manifest.json", manifest_to_json(manifest));
  std::lock_guard guard(registry_mutex_);
  cache_[id] = std::make_shared<const Dataset>(std::move(updated));
  return added;
}

std::string Store::put_model(const FittedModel& model, const ModelMeta& meta) {
  const std::string text = model_to_text(model);
  const std::string id = content_id(id_seed_, meta.dataset_id + "\n" + text);
  std::unique_lock lock(lock_for(id));
  const fs::path dir = model_dir(id);
  fs::create_directories(dir);
  write_file(dir / "model.json", text);
  write_file(dir / "meta.json", Json{{"dataset", meta.dataset_id}}.dump(2) + "\n");
  return id;
}

bool Store::has_model(const std::string& id) const { return valid_id(id) && fs::is_regular_file(model_dir(id) / "model.json"); }

FittedModel Store::model(const std::string& id) const {
  if (!has_model(id)) throw Error(ErrorCode::UnknownModel, "model " + id);
  std::shared_lock lock(lock_for(id));
  return load_model(model_dir(id) / "model.json");
}

Store::ModelMeta Store::model_meta(const std::string& id) const {
  if (!has_model(id)) throw Error(ErrorCode::UnknownModel, "model " + id);
  std::shared_lock lock(lock_for(id));
  const Json j = parse_json(read_text_file(model_dir(id) / "meta.json"), "model meta");
  return {j.value("dataset", std::string{})};
}

namespace {
std::vector<std::string> list_ids(const fs::path& dir) {
  std::vector<std::string> ids;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_directory() && valid_id(name)) ids.push_back(name);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}
}  // namespace

std::vector<std::string> Store::dataset_ids() const { return list_ids(root_ / "datasets"); }
std::vector<std::string> Store::model_ids() const { return list_ids(root_ / "models"); }

}  // namespace linkreg
