#include "evoarch/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "evoarch/archive.hpp"
#include "evoarch/changeset_format.hpp"
#include "evoarch/error.hpp"
#include "evoarch/facts_format.hpp"
#include "evoarch/ingest.hpp"
#include "evoarch/query.hpp"
#include "evoarch/resource.hpp"
#include "evoarch/rules.hpp"

namespace evoarch::cli {

namespace {

using nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  for (auto part : split(text, ',')) {
    if (part.empty()) throw UsageError("empty item in list '" + text + "'");
    out.emplace_back(part);
  }
  return out;
}

std::optional<Timestamp> opt_time(const std::string& text, const char* flag) {
  if (text.empty()) return std::nullopt;
  try {
    return parse_timestamp(text);
  } catch (const Error& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

std::string read_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Identifier> parse_ids(const std::string& text) {
  std::vector<Identifier> ids;
  for (const auto& s : split_list(text)) ids.push_back(parse_identifier(s));
  return ids;
}

ordered_json fact_json(const Fact& f) {
  ordered_json j;
  j["subject"] = f.subject.value;
  j["predicate"] = f.attribute.predicate.value;
  if (const auto* lit = std::get_if<Literal>(&f.attribute.object)) {
    j["object"] = lit->lexical;
    j["datatype"] = std::string(datatype_name(lit->datatype));
  } else {
    j["object"] = std::get<Identifier>(f.attribute.object).value;
    j["datatype"] = "uri-ref";
  }
  return j;
}

ordered_json facts_json(const FactSet& facts) {
  ordered_json arr = ordered_json::array();
  for (const auto& f : facts) arr.push_back(fact_json(f));
  return arr;
}

ordered_json changeset_json(const ChangeSet& cs) {
  ordered_json j;
  j["from"] = cs.from_version.value;
  j["to"] = cs.to_version.value;
  ordered_json low = ordered_json::array();
  for (const auto& c : cs.low_level) {
    ordered_json lines = ordered_json::array();
    for (const auto& l : change_lines(c)) lines.push_back(l);
    low.push_back({{"op", std::string(change_op_name(c.op))}, {"subject", c.subject.value}, {"lines", lines}});
  }
  j["low_level"] = low;
  ordered_json high = ordered_json::array();
  for (const auto& h : cs.high_level) {
    ordered_json hj;
    hj["name"] = h.name;
    ordered_json ctx = ordered_json::array();
    for (const auto& id : h.context) ctx.push_back(id.value);
    hj["context"] = ctx;
    ordered_json idx = ordered_json::array();
    for (const auto& c : h.constituents) {
      auto it = std::lower_bound(cs.low_level.begin(), cs.low_level.end(), c);
      idx.push_back(static_cast<std::size_t>(it - cs.low_level.begin()));
    }
    hj["constituents"] = idx;
    if (h.annotation) hj["annotation"] = *h.annotation;
    high.push_back(hj);
  }
  j["high_level"] = high;
  return j;
}

void check_format(const std::string& format, std::initializer_list<std::string_view> allowed) {
  for (auto a : allowed)
    if (format == a) return;
  throw UsageError("--format " + format + " is not supported by this command");
}

void print_facts(std::ostream& out, const FactSet& facts, const std::string& format) {
  if (format == "json") {
    out << facts_json(facts).dump(2) << '\n';
  } else {
    out << serialize_facts(facts);
  }
}

void print_changeset(std::ostream& out, const ChangeSet& cs, const std::string& format) {
  if (format == "json") {
    out << changeset_json(cs).dump(2) << '\n';
  } else {
    out << serialize_changeset(cs);
  }
}

ordered_json instantiation_json(const DatasetInstantiation& v) {
  ordered_json j;
  j["id"] = v.version_id.value;
  j["label"] = v.label;
  j["tx_start"] = format_timestamp(v.temporal.transaction_time.start);
  j["tx_end"] = v.temporal.transaction_time.end ? ordered_json(format_timestamp(*v.temporal.transaction_time.end))
                                                 : ordered_json(nullptr);
  j["agent"] = v.provenance.agent;
  j["process"] = v.provenance.process;
  j["source"] = v.provenance.source;
  j["record_set_hash"] = v.record_set_hash;
  j["schema_hash"] = v.schema_hash;
  return j;
}

// Options shared by every command. Values are bound before parsing.
struct Options {
  std::string archive;

  std::string init_dir;

  std::string title, model;

  std::string dataset, config, tx_time, valid_from, valid_to, agent, process, source, note, file;

  std::string list_what, from, to;

  std::string version, at, subjects, predicates, resource, format = "facts";

  std::string v1, v2, rules_file, types, part;
  bool high_level = false;

  std::string res_name, condition_predicate, ref, literal, datatype = "string", res_predicates;
  int depth = 0;

  std::string output;
};

class Runner {
 public:
  Runner(Options& o, std::ostream& out) : o_(o), out_(out) {}

  std::filesystem::path archive_root() const {
    if (!o_.archive.empty()) return o_.archive;
    if (const char* env = std::getenv("EVOARCH_ROOT"); env && *env) return env;
    throw UsageError("no archive: pass --archive or set EVOARCH_ROOT");
  }

  void init() {
    Archive::init(o_.init_dir);
    out_ << "initialized " << o_.init_dir << '\n';
  }

  void register_dataset() {
    SourceModel model = parse_model(o_.model);
    Archive archive(archive_root());
    out_ << archive.register_dataset(o_.title, model).diachronic_id.value << '\n';
  }

  void ingest() {
    IngestRequest req;
    req.dataset = o_.dataset;
    req.model = parse_model(o_.model);
    if (req.model != SourceModel::kRdf && o_.config.empty()) {
      throw UsageError("--config is required for relational and multidimensional sources");
    }
    req.transaction_start = *opt_time(o_.tx_time, "--tx-time");
    auto vf = opt_time(o_.valid_from, "--valid-from");
    auto vt = opt_time(o_.valid_to, "--valid-to");
    if (vt && !vf) throw UsageError("--valid-to requires --valid-from");
    if (vf) req.valid_time = TimeInterval{*vf, vt};
    req.provenance.agent = o_.agent.empty() ? default_agent() : o_.agent;
    req.provenance.process = o_.process;
    req.provenance.source = o_.source.empty() ? o_.file : o_.source;
    req.provenance.recorded_at = std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
    if (!o_.note.empty()) req.provenance.annotation = o_.note;

    Archive archive(archive_root());
    req.source_text = read_input(o_.file);
    if (!o_.config.empty()) req.mapping_config = read_input(o_.config);
    out_ << evoarch::ingest(archive, req).label << '\n';
  }

  void list() {
    check_format(o_.format, {"facts", "json"});
    Archive archive(archive_root());
    if (o_.list_what == "datasets") {
      if (!o_.dataset.empty()) throw UsageError("list datasets takes no dataset argument");
      DatasetFilter filter;
      if (!o_.model.empty()) filter.model = parse_model(o_.model);
      if (!o_.agent.empty()) filter.agent = o_.agent;
      filter.from = opt_time(o_.from, "--from");
      filter.to = opt_time(o_.to, "--to");
      auto datasets = archive.list_datasets(filter);
      if (o_.format == "json") {
        ordered_json arr = ordered_json::array();
        for (const auto& d : datasets) {
          arr.push_back({{"id", d.diachronic_id.value},
                         {"slug", d.slug},
                         {"title", d.title},
                         {"model", std::string(source_model_name(d.source_model))},
                         {"versions", d.version_ids.size()}});
        }
        out_ << arr.dump(2) << '\n';
      } else {
        for (const auto& d : datasets) {
          out_ << d.diachronic_id.value << '\t' << source_model_name(d.source_model) << '\t'
               << d.version_ids.size() << '\t' << d.title << '\n';
        }
      }
    } else {
      if (o_.dataset.empty()) throw UsageError("list versions requires a dataset");
      if (!o_.model.empty()) throw UsageError("--model applies to list datasets only");
      VersionFilter filter;
      if (!o_.agent.empty()) filter.agent = o_.agent;
      filter.from = opt_time(o_.from, "--from");
      filter.to = opt_time(o_.to, "--to");
      auto versions = archive.list_versions(o_.dataset, filter);
      if (o_.format == "json") {
        ordered_json arr = ordered_json::array();
        for (const auto& v : versions) arr.push_back(instantiation_json(v));
        out_ << arr.dump(2) << '\n';
      } else {
        for (const auto& v : versions) {
          out_ << v.label << '\t' << v.version_id.value << '\t' << format_timestamp(v.temporal.transaction_time.start)
               << '\t'
               << (v.temporal.transaction_time.end ? format_timestamp(*v.temporal.transaction_time.end) : "-")
               << '\t' << v.provenance.agent << '\n';
        }
      }
    }
  }

  std::optional<PartSelector> show_part() const {
    int n = !o_.subjects.empty() + !o_.predicates.empty() + !o_.resource.empty();
    if (n > 1) throw UsageError("use at most one of --subjects, --predicates, --resource");
    if (!o_.subjects.empty()) return SubjectPart{parse_ids(o_.subjects)};
    if (!o_.predicates.empty()) return PredicatePart{parse_ids(o_.predicates)};
    if (!o_.resource.empty()) return ResourcePart{o_.resource};
    return std::nullopt;
  }

  void show() {
    check_format(o_.format, {"facts", "json"});
    if (!o_.version.empty() && !o_.at.empty()) throw UsageError("use either --version or --at");
    auto part = show_part();
    auto at = opt_time(o_.at, "--at");
    VersionSelector sel = !o_.version.empty() ? VersionSelector::version(o_.version)
                          : at               ? VersionSelector::at(*at)
                                             : VersionSelector::latest();
    Archive archive(archive_root());
    print_facts(out_, snapshot_query(archive, o_.dataset, sel, part), o_.format);
  }

  void diff() {
    if (o_.format == "facts") o_.format = "cs";
    check_format(o_.format, {"cs", "json"});
    std::optional<std::set<std::string>> types;
    if (!o_.types.empty()) {
      auto list = split_list(o_.types);
      types = std::set<std::string>(list.begin(), list.end());
    }
    std::optional<PartSelector> part;
    if (!o_.part.empty()) part = parse_part_selector(o_.part);
    std::vector<ChangeRule> extra;
    if (!o_.rules_file.empty()) {
      if (!o_.high_level) throw UsageError("--rules requires --high-level");
      extra = parse_rules(read_input(o_.rules_file));
    }

    Archive archive(archive_root());
    ChangeSet cs = changes_query(archive, o_.dataset, o_.v1, o_.v2, std::nullopt, part);
    if (!extra.empty()) {
      // User rules run after the built-ins over the same low-level changes.
      ChangeSet only_low = cs;
      only_low.high_level.clear();
      ChangeSet user = derive_high_level(std::move(only_low), extra);
      cs.high_level.insert(cs.high_level.end(), user.high_level.begin(), user.high_level.end());
    }
    if (types) cs = filter_change_types(cs, *types);
    if (!o_.high_level) cs.high_level.clear();
    print_changeset(out_, cs, o_.format);
  }

  void resource_define() {
    ResourceIdentification ident;
    const bool explicit_mode = !o_.subjects.empty();
    const bool condition_mode = !o_.condition_predicate.empty();
    if (explicit_mode == condition_mode) throw UsageError("give either --subjects or --where");
    if (explicit_mode) {
      ident.mode = ResourceIdentification::Mode::kExplicitSubjects;
      ident.subjects = parse_ids(o_.subjects);
      if (!o_.ref.empty() || !o_.literal.empty()) throw UsageError("--ref/--literal require --where");
    } else {
      ident.mode = ResourceIdentification::Mode::kPredicateValueCondition;
      ident.predicate = parse_identifier(o_.condition_predicate);
      if (o_.ref.empty() == o_.literal.empty()) throw UsageError("--where needs exactly one of --ref, --literal");
      if (!o_.ref.empty()) {
        ident.value = parse_identifier(o_.ref);
      } else {
        auto dt = try_parse_datatype(o_.datatype);
        if (!dt) throw UsageError("unknown datatype " + o_.datatype);
        ident.value = Literal::make(o_.literal, *dt);
      }
    }
    ResourceDescription desc;
    if (!o_.res_predicates.empty()) desc.predicate_whitelist = parse_ids(o_.res_predicates);
    desc.expansion_depth = o_.depth;
    Archive archive(archive_root());
    out_ << define_resource(archive, o_.dataset, ident, desc, o_.res_name).resource_id.value << '\n';
  }

  void resource_eval() {
    check_format(o_.format, {"facts", "json"});
    Archive archive(archive_root());
    DiachronicResource r = load_resource(archive, o_.res_name);
    std::string version = o_.version.empty() ? archive.latest_version(r.dataset_id.value).label : o_.version;
    print_facts(out_, evaluate_resource(archive, r, version).facts, o_.format);
  }

  void resource_diff_cmd() {
    if (o_.format == "facts") o_.format = "cs";
    check_format(o_.format, {"cs", "json"});
    Archive archive(archive_root());
    DiachronicResource r = load_resource(archive, o_.res_name);
    print_changeset(out_, resource_diff(archive, r, o_.v1, o_.v2), o_.format);
  }

  void resource_list() {
    Archive archive(archive_root());
    for (const auto& name : archive.resource_names()) {
      DiachronicResource r = load_resource(archive, name);
      out_ << r.name << '\t' << r.resource_id.value << '\t' << r.dataset_id.value << '\n';
    }
  }

  void timeline() {
    check_format(o_.format, {"facts", "json"});
    std::optional<PartSelector> part;
    if (!o_.part.empty()) part = parse_part_selector(o_.part);
    auto from = opt_time(o_.from, "--from");
    auto to = opt_time(o_.to, "--to");
    Archive archive(archive_root());
    Timeline tl = longitudinal_query(archive, o_.dataset, part, from, to);
    if (o_.format == "json") {
      ordered_json arr = ordered_json::array();
      for (const auto& e : tl) {
        arr.push_back({{"version", e.version_id.value},
                       {"label", e.label},
                       {"tx_start", format_timestamp(e.transaction_start)},
                       {"facts", facts_json(e.facts)}});
      }
      out_ << arr.dump(2) << '\n';
    } else {
      for (const auto& e : tl) {
        out_ << "# " << e.label << '\t' << e.version_id.value << '\t' << format_timestamp(e.transaction_start) << '\n';
        out_ << serialize_facts(e.facts);
      }
    }
  }

  void mixed() {
    check_format(o_.format, {"facts", "json"});
    auto list = split_list(o_.types);
    std::set<std::string> types(list.begin(), list.end());
    auto from = opt_time(o_.from, "--from");
    auto to = opt_time(o_.to, "--to");
    Archive archive(archive_root());
    auto hits = mixed_query(archive, types, from, to);
    if (o_.format == "json") {
      ordered_json arr = ordered_json::array();
      for (const auto& h : hits) {
        ordered_json affected = ordered_json::array();
        for (const auto& id : h.affected) affected.push_back(id.value);
        arr.push_back({{"dataset", h.dataset_id.value}, {"affected", affected}, {"changesets", h.changeset_files}});
      }
      out_ << arr.dump(2) << '\n';
    } else {
      for (const auto& h : hits) {
        for (const auto& id : h.affected) out_ << h.dataset_id.value << '\t' << id.value << '\n';
      }
    }
  }

  void export_version() {
    Archive archive(archive_root());
    std::string text = export_canonical(archive, o_.dataset, o_.version);
    if (o_.output.empty() || o_.output == "-") {
      out_ << text;
    } else {
      write_file_atomic(o_.output, text);
    }
  }

 private:
  static SourceModel parse_model(const std::string& s) {
    if (s == "relational") return SourceModel::kRelational;
    if (s == "multidimensional" || s == "cube") return SourceModel::kMultidimensional;
    if (s == "rdf") return SourceModel::kRdf;
    throw UsageError("--model must be relational, multidimensional or rdf");
  }

  static std::string default_agent() {
    if (const char* user = std::getenv("USER"); user && *user) return user;
    return "unknown";
  }

  Options& o_;
  std::ostream& out_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  Runner runner(o, out);
  std::function<void()> action;

  CLI::App app{"Archive, diff and query evolving datasets", "evoarch"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  auto add_archive = [&](CLI::App* cmd) {
    cmd->add_option("--archive", o.archive, "Archive root (default: $EVOARCH_ROOT)");
  };

  auto* init = app.add_subcommand("init", "Create an empty archive");
  init->add_option("dir", o.init_dir)->required();
  init->callback([&] { action = [&] { runner.init(); }; });

  auto* reg = app.add_subcommand("register", "Register a dataset");
  add_archive(reg);
  reg->add_option("--title", o.title)->required();
  reg->add_option("--model", o.model)->required();
  reg->callback([&] { action = [&] { runner.register_dataset(); }; });

  auto* ing = app.add_subcommand("ingest", "Map a source file and commit it as a new version");
  add_archive(ing);
  ing->add_option("--dataset", o.dataset)->required();
  ing->add_option("--model", o.model)->required();
  ing->add_option("--config", o.config, "Mapping config (JSON) for relational and multidimensional sources");
  ing->add_option("--tx-time", o.tx_time, "Transaction start, ISO-8601 UTC")->required();
  ing->add_option("--valid-from", o.valid_from);
  ing->add_option("--valid-to", o.valid_to);
  ing->add_option("--agent", o.agent);
  ing->add_option("--process", o.process);
  ing->add_option("--source", o.source);
  ing->add_option("--note", o.note);
  ing->add_option("file", o.file)->required();
  ing->callback([&] { action = [&] { runner.ingest(); }; });

  auto* list = app.add_subcommand("list", "List datasets or versions of one dataset");
  add_archive(list);
  list->add_option("what", o.list_what)->required()->check(CLI::IsMember({"datasets", "versions"}));
  list->add_option("dataset", o.dataset);
  list->add_option("--model", o.model);
  list->add_option("--agent", o.agent);
  list->add_option("--from", o.from);
  list->add_option("--to", o.to);
  list->add_option("--format", o.format);
  list->callback([&] { action = [&] { runner.list(); }; });

  auto* show = app.add_subcommand("show", "Facts of one version (latest by default)");
  add_archive(show);
  show->add_option("dataset", o.dataset)->required();
  show->add_option("--version", o.version);
  show->add_option("--at", o.at);
  show->add_option("--subjects", o.subjects, "Comma-separated subject ids");
  show->add_option("--predicates", o.predicates, "Comma-separated predicate ids");
  show->add_option("--resource", o.resource, "Resource name");
  show->add_option("--format", o.format);
  show->callback([&] { action = [&] { runner.show(); }; });

  auto* diff = app.add_subcommand("diff", "Changes between two versions");
  add_archive(diff);
  diff->add_option("dataset", o.dataset)->required();
  diff->add_option("v1", o.v1)->required();
  diff->add_option("v2", o.v2)->required();
  diff->add_flag("--high-level", o.high_level, "Include high-level changes");
  diff->add_option("--rules", o.rules_file, "Extra rule file");
  diff->add_option("--type", o.types, "Comma-separated change types");
  diff->add_option("--part", o.part, "subjects:<ids> | predicates:<ids> | resource:<name>");
  diff->add_option("--format", o.format);
  diff->callback([&] { action = [&] { runner.diff(); }; });

  auto* res = app.add_subcommand("resource", "Diachronic resources");
  res->require_subcommand(1);
  auto* rdef = res->add_subcommand("define", "Define a resource");
  add_archive(rdef);
  rdef->add_option("--dataset", o.dataset)->required();
  rdef->add_option("--name", o.res_name)->required();
  rdef->add_option("--subjects", o.subjects, "Comma-separated subject ids");
  rdef->add_option("--where", o.condition_predicate, "Condition predicate");
  rdef->add_option("--ref", o.ref, "Condition value (identifier)");
  rdef->add_option("--literal", o.literal, "Condition value (literal)");
  rdef->add_option("--datatype", o.datatype, "Datatype of --literal");
  rdef->add_option("--predicates", o.res_predicates, "Predicate whitelist");
  rdef->add_option("--depth", o.depth, "Expansion depth 0-3");
  rdef->callback([&] { action = [&] { runner.resource_define(); }; });
  auto* reval = res->add_subcommand("eval", "Resource context at one version");
  add_archive(reval);
  reval->add_option("name", o.res_name)->required();
  reval->add_option("--version", o.version);
  reval->add_option("--format", o.format);
  reval->callback([&] { action = [&] { runner.resource_eval(); }; });
  auto* rdiff = res->add_subcommand("diff", "Changes to a resource between two versions");
  add_archive(rdiff);
  rdiff->add_option("name", o.res_name)->required();
  rdiff->add_option("v1", o.v1)->required();
  rdiff->add_option("v2", o.v2)->required();
  rdiff->add_option("--format", o.format);
  rdiff->callback([&] { action = [&] { runner.resource_diff_cmd(); }; });
  auto* rlist = res->add_subcommand("list", "List resources");
  add_archive(rlist);
  rlist->callback([&] { action = [&] { runner.resource_list(); }; });

  auto* query = app.add_subcommand("query", "Longitudinal and cross-dataset queries");
  query->require_subcommand(1);
  auto* qtl = query->add_subcommand("timeline", "Facts of every version in a time range");
  add_archive(qtl);
  qtl->add_option("dataset", o.dataset)->required();
  qtl->add_option("--part", o.part);
  qtl->add_option("--from", o.from);
  qtl->add_option("--to", o.to);
  qtl->add_option("--format", o.format);
  qtl->callback([&] { action = [&] { runner.timeline(); }; });
  auto* qmix = query->add_subcommand("mixed", "Datasets affected by given change types");
  add_archive(qmix);
  qmix->add_option("--type", o.types)->required();
  qmix->add_option("--from", o.from);
  qmix->add_option("--to", o.to);
  qmix->add_option("--format", o.format);
  qmix->callback([&] { action = [&] { runner.mixed(); }; });

  auto* exp = app.add_subcommand("export", "Write a version in its native format");
  add_archive(exp);
  exp->add_option("dataset", o.dataset)->required();
  exp->add_option("--version", o.version)->required();
  exp->add_option("-o,--output", o.output);
  exp->callback([&] { action = [&] { runner.export_version(); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << e.formatted() << '\n';
    return kExitDomainError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << Error(ErrorCode::kIoError, e.what()).formatted() << '\n';
    return kExitDomainError;
  }
}

}  // namespace evoarch::cli
