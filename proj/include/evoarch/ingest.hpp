#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "evoarch/archive.hpp"
#include "evoarch/mapping.hpp"

namespace evoarch {

// Parses source text in its native format and maps it to the common model.
// `mapping_config` is the relational or cube JSON config; ignored for RDF.
MappedVersion map_source(SourceModel model, std::string_view source_text, std::string_view mapping_config,
                         std::string_view dataset_slug);

struct IngestRequest {
  std::string dataset;  // title, slug or dataset id; registered when absent
  SourceModel model = SourceModel::kRdf;
  std::string source_text;
  std::string mapping_config;
  Timestamp transaction_start;
  std::optional<TimeInterval> valid_time;
  ProvenanceInfo provenance;
};

// Registers the dataset if needed, maps the source and commits a version.
// kDatasetMismatch when an existing dataset has another source model.
DatasetInstantiation ingest(Archive& archive, const IngestRequest& request);

// Canonical native serialization of a stored version: CSV for relational and
// cube datasets (using the stored mapping config), N-Triples for RDF.
std::string export_canonical(const Archive& archive, std::string_view dataset, std::string_view version);

}  // namespace evoarch
