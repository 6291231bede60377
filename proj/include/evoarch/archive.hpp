#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evoarch/delta.hpp"
#include "evoarch/model.hpp"

namespace evoarch {

// On-disk layout under the archive root:
//   archive.meta                          JSON manifest
//   archive.lock                          present while a writer is active
//   datasets/<slug>/dataset.meta          JSON: dataset + version metadata
//   blobs/<hash>.facts, blobs/<hash>.schema
//   changesets/<slug>/<v_from>_<v_to>.cs
//   resources/<name>.def
// Blobs are content addressed and written once. Metadata files are replaced
// atomically (write to a temp file, then rename).

struct ArchiveManifest {
  int format_version = 1;
  Timestamp created_at;
  std::vector<Identifier> dataset_index;
};

struct DatasetFilter {
  std::optional<SourceModel> model;
  std::optional<std::string> agent;  // some version committed by this agent
  std::optional<Timestamp> from;     // some version's transaction interval overlaps [from, to]
  std::optional<Timestamp> to;
};

struct VersionFilter {
  std::optional<std::string> agent;
  std::optional<Timestamp> from;
  std::optional<Timestamp> to;
};

// Closed query range [from, to] against a half-open version interval.
bool interval_overlaps(const TimeInterval& version, std::optional<Timestamp> from,
                       std::optional<Timestamp> to);

struct LoadedVersion {
  DatasetInstantiation instantiation;
  SchemaVersion schema;
  RecordSet records;
};

class Archive {
 public:
  // Creates the layout in an empty or missing directory. Throws
  // kAlreadyInitialized when `root` exists and is not empty.
  static ArchiveManifest init(const std::filesystem::path& root, Timestamp now);
  static ArchiveManifest init(const std::filesystem::path& root);

  // Throws kNotAnArchive when `root` has no manifest.
  explicit Archive(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  ArchiveManifest manifest() const;

  // Dataset arguments accept a slug, a title (slugified) or a full
  // evoarch:ds/ identifier.
  DiachronicDataset register_dataset(std::string_view title, SourceModel model);
  std::optional<DiachronicDataset> find_dataset(std::string_view dataset) const;
  DiachronicDataset dataset(std::string_view dataset) const;
  std::vector<DiachronicDataset> list_datasets(const DatasetFilter& filter = {}) const;

  // Versions in sequence order.
  std::vector<DatasetInstantiation> versions(std::string_view dataset) const;
  std::vector<DatasetInstantiation> list_versions(std::string_view dataset,
                                                  const VersionFilter& filter = {}) const;

  // Appends a version. The transaction start must be strictly later than the
  // previous version's, whose interval is closed at the new start. The
  // change set against the previous version (built-in high-level rules
  // applied) is cached.
  DatasetInstantiation commit_version(std::string_view dataset, const SchemaVersion& schema,
                                     const RecordSet& records, TemporalAnnotation temporal,
                                     ProvenanceInfo provenance, std::string mapping_config = "");

  // Version arguments accept a label (v0002) or a full version identifier.
  DatasetInstantiation instantiation(std::string_view dataset, std::string_view version) const;
  // Loads and verifies blob hashes; kCorruptArchive on any mismatch.
  LoadedVersion get_version(std::string_view dataset, std::string_view version) const;
  DatasetInstantiation resolve_version_at(std::string_view dataset, Timestamp t) const;
  DatasetInstantiation latest_version(std::string_view dataset) const;

  // Cached change set between consecutive versions, if one was stored.
  std::optional<std::string> cached_changeset_text(std::string_view dataset, const DatasetInstantiation& from,
                                                   const DatasetInstantiation& to) const;
  std::filesystem::path changeset_path(const DiachronicDataset& ds, const DatasetInstantiation& from,
                                       const DatasetInstantiation& to) const;

  // Raw resource definition storage (JSON text). Throws kResourceExists /
  // kResourceNotFound.
  void put_resource_definition(std::string_view name, const std::string& json_text);
  std::string resource_definition(std::string_view name) const;
  std::vector<std::string> resource_names() const;

  std::filesystem::path facts_blob_path(std::string_view hash) const;
  std::filesystem::path schema_blob_path(std::string_view hash) const;

 private:
  std::filesystem::path dataset_meta_path(std::string_view slug) const;
  std::string resolve_slug(std::string_view dataset) const;
  void write_dataset(const DiachronicDataset& ds, const std::vector<DatasetInstantiation>& versions);
  std::pair<DiachronicDataset, std::vector<DatasetInstantiation>> read_dataset(std::string_view slug) const;

  std::filesystem::path root_;
};

std::string read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace evoarch
