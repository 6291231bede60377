#include "evoarch/archive.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "evoarch/changeset_format.hpp"
#include "evoarch/error.hpp"
#include "evoarch/facts_format.hpp"
#include "evoarch/hash.hpp"
#include "evoarch/rules.hpp"

namespace evoarch {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kManifestFile = "archive.meta";
constexpr std::string_view kLockFile = "archive.lock";

// Single-writer lock: an exclusively created lock file, removed on release.
class WriterLock {
 public:
  explicit WriterLock(const fs::path& root) : path_(root / kLockFile) {
    int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
      throw Error(ErrorCode::kArchiveLocked,
                  "archive is locked by another writer (remove " + path_.string() + " if stale)");
    }
    std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
    ::close(fd);
  }
  ~WriterLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  WriterLock(const WriterLock&) = delete;
  WriterLock& operator=(const WriterLock&) = delete;

 private:
  fs::path path_;
};

json timestamp_json(std::optional<Timestamp> t) {
  return t ? json(format_timestamp(*t)) : json(nullptr);
}

std::optional<Timestamp> optional_timestamp(const json& j) {
  if (j.is_null()) return std::nullopt;
  return parse_timestamp(j.get<std::string>());
}

json instantiation_json(const DatasetInstantiation& v) {
  json j;
  j["id"] = v.version_id.value;
  j["label"] = v.label;
  j["tx_start"] = format_timestamp(v.temporal.transaction_time.start);
  j["tx_end"] = timestamp_json(v.temporal.transaction_time.end);
  if (v.temporal.valid_time) {
    j["valid_from"] = format_timestamp(v.temporal.valid_time->start);
    j["valid_to"] = timestamp_json(v.temporal.valid_time->end);
  } else {
    j["valid_from"] = nullptr;
    j["valid_to"] = nullptr;
  }
  j["agent"] = v.provenance.agent;
  j["process"] = v.provenance.process;
  j["source"] = v.provenance.source;
  j["recorded_at"] = format_timestamp(v.provenance.recorded_at);
  j["annotation"] = v.provenance.annotation ? json(*v.provenance.annotation) : json(nullptr);
  j["schema_id"] = v.schema_version_id.value;
  j["schema_hash"] = v.schema_hash;
  j["record_set_hash"] = v.record_set_hash;
  j["mapping"] = v.mapping_config.empty() ? json(nullptr) : json::parse(v.mapping_config);
  return j;
}

DatasetInstantiation instantiation_from_json(const json& j, const Identifier& dataset_id) {
  DatasetInstantiation v;
  v.version_id = Identifier::uri(j.at("id").get<std::string>());
  v.label = j.at("label").get<std::string>();
  v.diachronic_id = dataset_id;
  v.temporal.transaction_time.start = parse_timestamp(j.at("tx_start").get<std::string>());
  v.temporal.transaction_time.end = optional_timestamp(j.at("tx_end"));
  if (!j.at("valid_from").is_null()) {
    v.temporal.valid_time = TimeInterval{parse_timestamp(j.at("valid_from").get<std::string>()),
                                         optional_timestamp(j.at("valid_to"))};
  }
  v.provenance.agent = j.at("agent").get<std::string>();
  v.provenance.process = j.at("process").get<std::string>();
  v.provenance.source = j.at("source").get<std::string>();
  v.provenance.recorded_at = parse_timestamp(j.at("recorded_at").get<std::string>());
  if (!j.at("annotation").is_null()) v.provenance.annotation = j.at("annotation").get<std::string>();
  v.schema_version_id = Identifier::opaque(j.at("schema_id").get<std::string>());
  v.schema_hash = j.at("schema_hash").get<std::string>();
  v.record_set_hash = j.at("record_set_hash").get<std::string>();
  if (!j.at("mapping").is_null()) v.mapping_config = j.at("mapping").dump();
  return v;
}

void write_manifest(const fs::path& root, const ArchiveManifest& m) {
  json j;
  j["format_version"] = m.format_version;
  j["created_at"] = format_timestamp(m.created_at);
  j["datasets"] = json::array();
  for (const auto& id : m.dataset_index) j["datasets"].push_back(id.value);
  write_file_atomic(root / kManifestFile, j.dump(2) + "\n");
}

[[noreturn]] void corrupt(const std::string& msg) { throw Error(ErrorCode::kCorruptArchive, msg); }

std::string load_blob(const fs::path& path, std::string_view expected_hash) {
  if (!fs::exists(path)) corrupt("missing blob " + path.filename().string());
  std::string bytes = read_file(path);
  if (sha256_hex(bytes) != expected_hash) corrupt("hash mismatch in " + path.filename().string());
  return bytes;
}

void write_blob(const fs::path& path, std::string_view content) {
  if (fs::exists(path)) return;
  write_file_atomic(path, content);
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::kIoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot rename into " + path.string() + ": " + ec.message());
}

bool interval_overlaps(const TimeInterval& version, std::optional<Timestamp> from,
                       std::optional<Timestamp> to) {
  if (to && version.start > *to) return false;
  if (from && version.end && *version.end <= *from) return false;
  return true;
}

ArchiveManifest Archive::init(const fs::path& root) {
  return init(root, std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now()));
}

ArchiveManifest Archive::init(const fs::path& root, Timestamp now) {
  std::error_code ec;
  if (fs::exists(root, ec)) {
    if (!fs::is_directory(root) || !fs::is_empty(root)) {
      throw Error(ErrorCode::kAlreadyInitialized, root.string() + " exists and is not empty");
    }
  }
  for (auto sub : {"datasets", "blobs", "changesets", "resources"}) {
    fs::create_directories(root / sub, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot create " + (root / sub).string() + ": " + ec.message());
  }
  ArchiveManifest m{1, now, {}};
  write_manifest(root, m);
  return m;
}

Archive::Archive(fs::path root) : root_(std::move(root)) {
  if (!fs::exists(root_ / kManifestFile)) {
    throw Error(ErrorCode::kNotAnArchive, root_.string() + " is not an evoarch archive");
  }
}

ArchiveManifest Archive::manifest() const {
  json j;
  try {
    j = json::parse(read_file(root_ / kManifestFile));
  } catch (const json::exception& e) {
    corrupt(std::string("unreadable manifest: ") + e.what());
  }
  ArchiveManifest m;
  m.format_version = j.at("format_version").get<int>();
  if (m.format_version != 1) corrupt("unsupported format_version " + std::to_string(m.format_version));
  m.created_at = parse_timestamp(j.at("created_at").get<std::string>());
  for (const auto& id : j.at("datasets")) m.dataset_index.push_back(Identifier::uri(id.get<std::string>(), IdScope::kDiachronic));
  return m;
}

fs::path Archive::dataset_meta_path(std::string_view slug) const {
  return root_ / "datasets" / std::string(slug) / "dataset.meta";
}

fs::path Archive::facts_blob_path(std::string_view hash) const {
  return root_ / "blobs" / (std::string(hash) + ".facts");
}

fs::path Archive::schema_blob_path(std::string_view hash) const {
  return root_ / "blobs" / (std::string(hash) + ".schema");
}

std::string Archive::resolve_slug(std::string_view dataset) const {
  constexpr std::string_view prefix = "evoarch:ds/";
  if (dataset.starts_with(prefix)) {
    std::string_view rest = dataset.substr(prefix.size());
    if (auto slash = rest.find('/'); slash != std::string_view::npos) rest = rest.substr(0, slash);
    return decode_component(rest);
  }
  return slugify(dataset);
}

std::pair<DiachronicDataset, std::vector<DatasetInstantiation>> Archive::read_dataset(std::string_view slug) const {
  fs::path meta = dataset_meta_path(slug);
  if (!fs::exists(meta)) throw Error(ErrorCode::kDatasetNotFound, "no dataset '" + std::string(slug) + "'");
  try {
    json j = json::parse(read_file(meta));
    DiachronicDataset ds;
    ds.diachronic_id = Identifier::uri(j.at("id").get<std::string>(), IdScope::kDiachronic);
    ds.slug = j.at("slug").get<std::string>();
    ds.title = j.at("title").get<std::string>();
    ds.source_model = parse_source_model(j.at("model").get<std::string>());
    std::vector<DatasetInstantiation> versions;
    for (const auto& v : j.at("versions")) {
      versions.push_back(instantiation_from_json(v, ds.diachronic_id));
      ds.version_ids.push_back(versions.back().version_id);
    }
    return {std::move(ds), std::move(versions)};
  } catch (const json::exception& e) {
    corrupt("unreadable dataset metadata for " + std::string(slug) + ": " + e.what());
  }
}

void Archive::write_dataset(const DiachronicDataset& ds, const std::vector<DatasetInstantiation>& versions) {
  json j;
  j["id"] = ds.diachronic_id.value;
  j["slug"] = ds.slug;
  j["title"] = ds.title;
  j["model"] = std::string(source_model_name(ds.source_model));
  j["versions"] = json::array();
  for (const auto& v : versions) j["versions"].push_back(instantiation_json(v));
  write_file_atomic(dataset_meta_path(ds.slug), j.dump(2) + "\n");
}

DiachronicDataset Archive::register_dataset(std::string_view title, SourceModel model) {
  const std::string slug = slugify(title);
  WriterLock lock(root_);
  if (fs::exists(dataset_meta_path(slug))) {
    throw Error(ErrorCode::kDatasetExists, "dataset '" + slug + "' already registered");
  }
  DiachronicDataset ds{mint_identifier(MintKind::kDiachronicDataset, {slug}), slug, std::string(title), model, {}};
  std::error_code ec;
  fs::create_directories(root_ / "datasets" / slug, ec);
  fs::create_directories(root_ / "changesets" / slug, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create dataset directories: " + ec.message());
  write_dataset(ds, {});
  ArchiveManifest m = manifest();
  m.dataset_index.push_back(ds.diachronic_id);
  std::sort(m.dataset_index.begin(), m.dataset_index.end());
  write_manifest(root_, m);
  return ds;
}

std::optional<DiachronicDataset> Archive::find_dataset(std::string_view dataset) const {
  std::string slug;
  try {
    slug = resolve_slug(dataset);
  } catch (const Error&) {
    return std::nullopt;
  }
  if (!fs::exists(dataset_meta_path(slug))) return std::nullopt;
  return read_dataset(slug).first;
}

DiachronicDataset Archive::dataset(std::string_view dataset) const {
  return read_dataset(resolve_slug(dataset)).first;
}

std::vector<DiachronicDataset> Archive::list_datasets(const DatasetFilter& filter) const {
  std::vector<DiachronicDataset> out;
  for (const auto& id : manifest().dataset_index) {
    auto [ds, versions] = read_dataset(resolve_slug(id.value));
    if (filter.model && ds.source_model != *filter.model) continue;
    if (filter.agent && std::none_of(versions.begin(), versions.end(), [&](const auto& v) {
          return v.provenance.agent == *filter.agent;
        }))
      continue;
    if ((filter.from || filter.to) && std::none_of(versions.begin(), versions.end(), [&](const auto& v) {
          return interval_overlaps(v.temporal.transaction_time, filter.from, filter.to);
        }))
      continue;
    out.push_back(std::move(ds));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.diachronic_id < b.diachronic_id; });
  return out;
}

std::vector<DatasetInstantiation> Archive::versions(std::string_view dataset) const {
  return read_dataset(resolve_slug(dataset)).second;
}

std::vector<DatasetInstantiation> Archive::list_versions(std::string_view dataset, const VersionFilter& filter) const {
  std::vector<DatasetInstantiation> out;
  for (auto& v : versions(dataset)) {
    if (filter.agent && v.provenance.agent != *filter.agent) continue;
    if (!interval_overlaps(v.temporal.transaction_time, filter.from, filter.to)) continue;
    out.push_back(std::move(v));
  }
  return out;
}

DatasetInstantiation Archive::commit_version(std::string_view dataset, const SchemaVersion& schema,
                                             const RecordSet& records, TemporalAnnotation temporal,
                                             ProvenanceInfo provenance, std::string mapping_config) {
  temporal.validate();
  provenance.validate();
  if (temporal.transaction_time.end) {
    throw Error(ErrorCode::kValidationError, "a new version's transaction time must be open-ended");
  }
  const std::string slug = resolve_slug(dataset);
  WriterLock lock(root_);
  auto [ds, versions] = read_dataset(slug);
  if (!versions.empty() && temporal.transaction_time.start <= versions.back().temporal.transaction_time.start) {
    throw Error(ErrorCode::kTemporalOrderViolation,
                "transaction time " + format_timestamp(temporal.transaction_time.start) +
                    " is not after the previous version's " +
                    format_timestamp(versions.back().temporal.transaction_time.start));
  }

  DatasetInstantiation inst;
  inst.label = version_label(versions.size() + 1);
  inst.version_id = mint_identifier(MintKind::kVersion, {slug, inst.label});
  inst.diachronic_id = ds.diachronic_id;
  inst.temporal = temporal;
  inst.provenance = std::move(provenance);
  inst.schema_version_id = schema.id();
  inst.schema_hash = schema.content_hash();
  inst.record_set_hash = records.content_hash();
  inst.mapping_config = std::move(mapping_config);

  write_blob(facts_blob_path(inst.record_set_hash), serialize_facts(records.facts()));
  write_blob(schema_blob_path(inst.schema_hash), serialize_schema(schema));

  if (!versions.empty()) {
    DatasetInstantiation& prev = versions.back();
    LoadedVersion before = get_version(slug, prev.label);
    ChangeSet cs = compute_delta(VersionView{ds.diachronic_id, prev.version_id, before.schema, before.records},
                                 VersionView{ds.diachronic_id, inst.version_id, schema, records});
    cs = derive_high_level(std::move(cs), builtin_rules());
    fs::create_directories(root_ / "changesets" / slug);
    write_file_atomic(changeset_path(ds, prev, inst), serialize_changeset(cs));
    prev.temporal.transaction_time.end = temporal.transaction_time.start;
  }
  versions.push_back(inst);
  write_dataset(ds, versions);
  return inst;
}

DatasetInstantiation Archive::instantiation(std::string_view dataset, std::string_view version) const {
  auto all = versions(dataset);
  for (auto& v : all) {
    if (v.label == version || v.version_id.value == version) return v;
  }
  throw Error(ErrorCode::kVersionNotFound, "no version '" + std::string(version) + "' in dataset '" +
                                               std::string(dataset) + "'");
}

LoadedVersion Archive::get_version(std::string_view dataset, std::string_view version) const {
  DatasetInstantiation inst = instantiation(dataset, version);
  const std::string slug = resolve_slug(dataset);
  std::string facts_text = load_blob(facts_blob_path(inst.record_set_hash), inst.record_set_hash);
  std::string schema_text = load_blob(schema_blob_path(inst.schema_hash), inst.schema_hash);
  try {
    RecordSet records = RecordSet::from_facts(parse_facts(facts_text), slug);
    SchemaVersion schema = parse_schema(schema_text);
    if (records.content_hash() != inst.record_set_hash) corrupt("record set hash mismatch for " + inst.label);
    if (schema.content_hash() != inst.schema_hash) corrupt("schema hash mismatch for " + inst.label);
    return {std::move(inst), std::move(schema), std::move(records)};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptArchive) throw;
    corrupt("cannot decode " + inst.label + ": " + e.what());
  }
}

DatasetInstantiation Archive::resolve_version_at(std::string_view dataset, Timestamp t) const {
  auto all = versions(dataset);
  const DatasetInstantiation* found = nullptr;
  for (const auto& v : all) {
    if (v.temporal.transaction_time.start <= t) found = &v;
  }
  if (!found) {
    throw Error(ErrorCode::kNoVersionAtTime, "no version of '" + std::string(dataset) + "' at " + format_timestamp(t));
  }
  return *found;
}

DatasetInstantiation Archive::latest_version(std::string_view dataset) const {
  auto all = versions(dataset);
  if (all.empty()) throw Error(ErrorCode::kVersionNotFound, "dataset '" + std::string(dataset) + "' has no versions");
  return all.back();
}

fs::path Archive::changeset_path(const DiachronicDataset& ds, const DatasetInstantiation& from,
                                 const DatasetInstantiation& to) const {
  return root_ / "changesets" / ds.slug / (from.label + "_" + to.label + ".cs");
}

std::optional<std::string> Archive::cached_changeset_text(std::string_view dataset, const DatasetInstantiation& from,
                                                          const DatasetInstantiation& to) const {
  fs::path p = changeset_path(this->dataset(dataset), from, to);
  if (!fs::exists(p)) return std::nullopt;
  return read_file(p);
}

void Archive::put_resource_definition(std::string_view name, const std::string& json_text) {
  if (name.empty()) throw Error(ErrorCode::kValidationError, "empty resource name");
  WriterLock lock(root_);
  fs::path p = root_ / "resources" / (encode_component(name) + ".def");
  if (fs::exists(p)) throw Error(ErrorCode::kResourceExists, "resource '" + std::string(name) + "' already defined");
  fs::create_directories(p.parent_path());
  write_file_atomic(p, json_text);
}

std::string Archive::resource_definition(std::string_view name) const {
  fs::path p = root_ / "resources" / (encode_component(name) + ".def");
  if (name.empty() || !fs::exists(p)) throw Error(ErrorCode::kResourceNotFound, "no resource '" + std::string(name) + "'");
  return read_file(p);
}

std::vector<std::string> Archive::resource_names() const {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(root_ / "resources", ec)) {
    if (e.path().extension() == ".def") out.push_back(decode_component(e.path().stem().string()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace evoarch
