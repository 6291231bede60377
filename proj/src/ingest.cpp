#include "evoarch/ingest.hpp"

#include "evoarch/csv.hpp"
#include "evoarch/error.hpp"
#include "evoarch/ntriples.hpp"

namespace evoarch {

MappedVersion map_source(SourceModel model, std::string_view source_text, std::string_view mapping_config,
                         std::string_view dataset_slug) {
  switch (model) {
    case SourceModel::kRelational: {
      RelationalConfig cfg = parse_relational_config(mapping_config);
      auto header = cfg.column_names();
      auto rows = parse_csv(source_text, header);
      return map_relational(rows, cfg, dataset_slug);
    }
    case SourceModel::kMultidimensional: {
      CubeConfig cfg = parse_cube_config(mapping_config);
      auto header = cfg.column_names();
      auto rows = parse_csv(source_text, header);
      return map_multidimensional(rows, cfg, dataset_slug);
    }
    case SourceModel::kRdf: {
      auto triples = parse_ntriples(source_text, dataset_slug);
      return map_rdf(triples, dataset_slug);
    }
  }
  throw Error(ErrorCode::kUnsupportedConstruct, "unknown source model");
}

DatasetInstantiation ingest(Archive& archive, const IngestRequest& request) {
  auto existing = archive.find_dataset(request.dataset);
  DiachronicDataset ds = existing ? *existing : archive.register_dataset(request.dataset, request.model);
  if (ds.source_model != request.model) {
    throw Error(ErrorCode::kDatasetMismatch, "dataset " + ds.slug + " holds " +
                                                 std::string(source_model_name(ds.source_model)) + " data, not " +
                                                 std::string(source_model_name(request.model)));
  }
  MappedVersion mapped = map_source(request.model, request.source_text, request.mapping_config, ds.slug);

  std::string stored_config;
  if (request.model == SourceModel::kRelational) {
    stored_config = to_json(parse_relational_config(request.mapping_config));
  } else if (request.model == SourceModel::kMultidimensional) {
    stored_config = to_json(parse_cube_config(request.mapping_config));
  }
  TemporalAnnotation temporal{TimeInterval{request.transaction_start, std::nullopt}, request.valid_time};
  return archive.commit_version(ds.slug, mapped.schema, mapped.records, temporal, request.provenance,
                                std::move(stored_config));
}

std::string export_canonical(const Archive& archive, std::string_view dataset, std::string_view version) {
  DiachronicDataset ds = archive.dataset(dataset);
  LoadedVersion v = archive.get_version(ds.slug, version);
  switch (ds.source_model) {
    case SourceModel::kRelational:
      return export_relational_csv(v.records, parse_relational_config(v.instantiation.mapping_config), ds.slug);
    case SourceModel::kMultidimensional:
      return export_cube_csv(v.records, parse_cube_config(v.instantiation.mapping_config), ds.slug);
    case SourceModel::kRdf:
      return export_ntriples(v.records, ds.slug);
  }
  throw Error(ErrorCode::kUnsupportedConstruct, "unknown source model");
}

}  // namespace evoarch
