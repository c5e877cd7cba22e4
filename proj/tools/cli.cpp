#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "citefield/corpus.hpp"
#include "citefield/errors.hpp"
#include "citefield/fields.hpp"
#include "citefield/flowgraph.hpp"
#include "citefield/metrics.hpp"
#include "citefield/reports.hpp"
#include "citefield/s2client.hpp"
#include "citefield/s2service.hpp"
#include "citefield/scope.hpp"
#include "citefield/subfields.hpp"

namespace citefield::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::string index = "citefield.idx";
  std::string out_dir = ".";
  std::string year_axis = "citing";
};

struct IngestArgs {
  std::string papers, edges;
  bool strict = false;
};

struct FlowsArgs {
  std::string focal = "nlp", direction = "both", format = "sankey", years, denominator = "slice", output;
};

struct CfdiArgs {
  std::string scope = "nlp", direction = "out", mode = "overall", years, output;
  std::optional<int> from, to;
  bool smooth = false;
};

struct RcpArgs {
  std::string focal = "nlp", direction = "out", years, output;
  bool all = false;
};

struct SeriesArgs {
  std::string scope = "nlp", output;
  std::optional<int> from, to;
  bool smooth = false;
};

struct SubfieldArgs {
  std::string lexicon, stopwords, analysis, years, output;
  std::size_t bigrams = 0;
};

struct DiversityArgs {
  std::string id, kind, base_url = "https://api.semanticscholar.org", histogram, cache_dir;
  double rps = 1.0;
  bool json = false;
};

struct ServeArgs {
  std::string host = "127.0.0.1", base_url = "https://api.semanticscholar.org", histogram, cache_dir;
  int port = 8080;
  double rps = 1.0;
};

/// What a scope/focal flag names: a pseudo-node built from a paper scope, or a field row.
struct Target {
  PaperScope scope = PaperScope::all();
  std::optional<PaperScope> focal;
  FlowNode node = FlowNode::focal();
  std::string name;
};

Target parse_target(const std::string& s) {
  if (s == "nlp") return {PaperScope::nlp(), PaperScope::nlp(), FlowNode::focal(), "nlp"};
  if (s == "non-nlp") return {PaperScope::non_nlp(), PaperScope::non_nlp(), FlowNode::focal(), "non-nlp"};
  if (s == "all") return {PaperScope::all(), PaperScope::all(), FlowNode::focal(), "all"};
  const auto id = FieldScheme::top_level().find(s);
  if (!id) throw UsageError("unknown scope or field '" + s + "'");
  return {PaperScope::top_level_field(*id), std::nullopt, FlowNode::field(*id),
          std::string(FieldScheme::top_level().token(*id))};
}

YearFilter parse_years(const std::string& s) {
  if (s.empty() || s == "all") return std::nullopt;
  int first = 0, last = 0;
  char dash = 0;
  std::istringstream in(s);
  if (!(in >> first)) throw UsageError("bad year range '" + s + "'");
  if (in >> dash) {
    if (dash != '-' || !(in >> last)) throw UsageError("bad year range '" + s + "'");
  } else {
    last = first;
  }
  if (first > last) throw UsageError("empty year range '" + s + "'");
  return YearRange{first, last};
}

std::string years_label(const YearFilter& y) {
  return y ? std::to_string(y->first) + "-" + std::to_string(y->last) : "all";
}

bool outgoing(const std::string& direction) {
  if (direction == "out") return true;
  if (direction == "in") return false;
  throw UsageError("direction must be 'out' or 'in'");
}

CorpusIndex open_index(const Common& c) {
  if (!fs::exists(c.index)) throw Error("index not found: " + c.index + " (run 'citefield ingest' first)");
  return load_index(c.index);
}

FlowTensor top_tensor(const CorpusIndex& index, const Common& c, std::optional<PaperScope> focal) {
  FlowSpec spec;
  spec.focal = std::move(focal);
  spec.threads = c.threads;
  if (c.year_axis == "cited") {
    spec.year_axis = YearAxis::CitedPaperYear;
  } else if (c.year_axis != "citing") {
    throw UsageError("year-axis must be 'citing' or 'cited'");
  }
  return build_flow_tensor(index, SchemeKind::TopLevel, spec);
}

fs::path output_path(const Common& c, const std::string& explicit_path, const std::string& default_name) {
  return explicit_path.empty() ? fs::path(c.out_dir) / default_name : fs::path(explicit_path);
}

YearRange series_range(const FlowTensor& t, std::optional<int> from, std::optional<int> to) {
  const auto years = t.years();
  YearRange r;
  r.first = from.value_or(years.empty() ? kMinYear : years.front());
  r.last = to.value_or(years.empty() ? kMinYear : years.back());
  if (r.first > r.last) throw UsageError("empty year range");
  return r;
}

void emit_series(const SeriesTable& table, const Common& c, const std::string& output, std::ostream& out) {
  write_series_csv(table, out);
  if (output.empty()) return;
  const fs::path path = output_path(c, output, "");
  if (path.extension() == ".json") {
    write_text_file(path, series_json(table).dump(2) + "\n");
  } else {
    std::ostringstream csv;
    write_series_csv(table, csv);
    write_text_file(path, csv.str());
  }
}

// --- commands ---

int cmd_ingest(const Common& c, const IngestArgs& a, std::ostream& out, std::ostream& err) {
  IngestOptions opt;
  opt.threads = c.threads;
  opt.strict = a.strict;
  auto result = build_index(fs::path(a.papers), fs::path(a.edges), opt);
  save_index(result.index, c.index);

  const CorpusIndex& index = result.index;
  const FlowTensor t = top_tensor(index, c, PaperScope::nlp());
  std::optional<int> first, last;
  std::uint64_t nlp_papers = 0;
  for (PaperIdx p = 0; p < index.paper_count(); ++p) {
    nlp_papers += index.is_nlp(p);
    if (auto y = index.year(p)) {
      first = std::min(first.value_or(*y), *y);
      last = std::max(last.value_or(*y), *y);
    }
  }
  const auto& s = result.summary;
  auto row = [&](const std::string& k, const auto& v) { out << std::left << std::setw(26) << k << v << '\n'; };
  row("time range", first ? std::to_string(*first) + "-" + std::to_string(*last) : std::string("unknown"));
  row("papers", index.paper_count());
  row("citations", index.edge_count());
  row("papers nlp", nlp_papers);
  row("out-citations from nlp", t.focal_out_edges());
  row("in-citations to nlp", t.focal_in_edges());
  row("dangling citations", s.dangling_edges);
  row("duplicate papers", s.duplicate_papers);
  row("rejected paper lines", s.rejected_papers);
  row("rejected edge lines", s.rejected_edges);
  row("index", c.index);
  for (const auto& e : s.errors) err << "warning: " << e << '\n';
  return kOk;
}

int cmd_flows(const Common& c, const FlowsArgs& a, std::ostream& out) {
  const Target target = parse_target(a.focal);
  const YearFilter years = parse_years(a.years);
  const CorpusIndex index = open_index(c);
  const FlowTensor t = top_tensor(index, c, target.focal);
  const auto fields = field_nodes(FieldScheme::top_level().all());
  const std::string dir = a.direction;
  if (dir != "out" && dir != "in" && dir != "both") throw UsageError("direction must be 'out', 'in' or 'both'");

  std::string text, ext;
  if (a.format == "sankey") {
    SankeyDenominator denom;
    if (a.denominator == "slice") {
      denom = SankeyDenominator::SliceTotal;
    } else if (a.denominator == "source") {
      denom = SankeyDenominator::SourceTotal;
    } else if (a.denominator == "target") {
      denom = SankeyDenominator::TargetTotal;
    } else {
      throw UsageError("denominator must be 'slice', 'source' or 'target'");
    }
    const std::string focal_label = t.node_name(target.node, true);
    auto half = [&](bool out_dir) {
      const auto slice = out_dir ? flow_slice(t, {target.node}, fields, years) : flow_slice(t, fields, {target.node}, years);
      return sankey_export(slice, denom, focal_label);
    };
    SankeyExport s = dir == "out" ? half(true) : dir == "in" ? half(false) : merge_sankey(half(false), half(true));
    for (const auto& w : s.warnings) out << "warning: " << w << '\n';
    text = sankey_json(s).dump(2) + "\n";
    ext = "json";
  } else if (a.format == "heatmap") {
    if (dir == "both") throw UsageError("heatmap needs --direction out or in");
    const FieldSet all = FieldScheme::top_level().all();
    std::vector<FlowNode> rows;
    if (t.has_focal()) rows.push_back(FlowNode::focal());
    rows.insert(rows.end(), fields.begin(), fields.end());
    std::vector<std::vector<double>> matrix;
    std::vector<std::string> row_labels, col_labels;
    for (const auto& f : fields) col_labels.push_back(t.node_name(f, false));
    for (const auto& node : rows) {
      const ShareTable shares = dir == "out" ? outgoing_shares(t, node, all, years) : incoming_shares(t, node, all, years);
      if (shares.empty()) continue;
      std::vector<double> r;
      for (const auto& share : shares.rows) r.push_back(share.percent);
      matrix.push_back(std::move(r));
      row_labels.push_back(t.node_name(node, true));
    }
    text = heatmap_csv(matrix, row_labels, col_labels, dir == "out" ? "citing" : "cited");
    ext = "csv";
  } else {
    throw UsageError("format must be 'sankey' or 'heatmap'");
  }
  const auto path =
      output_path(c, a.output, export_filename("flows-" + a.format + "-" + dir, target.name, years, ext));
  write_text_file(path, text);
  out << "wrote " << path.string() << '\n';
  return kOk;
}

int cmd_cfdi(const Common& c, const CfdiArgs& a, std::ostream& out) {
  const Target target = parse_target(a.scope);
  const bool out_dir = outgoing(a.direction);
  const YearFilter years = parse_years(a.years);
  const CorpusIndex index = open_index(c);

  if (a.mode == "bins") {
    if (!out_dir) throw UsageError("bins mode is outgoing only");
    const auto table = cfdi_by_bin_and_period(index, PaperLabels::top_level(index), target.scope, default_periods());
    out << std::left << std::setw(12) << "bin";
    for (const auto& p : table.periods) out << std::setw(18) << (std::to_string(p.first) + "-" + std::to_string(p.last));
    out << '\n';
    for (CitationBin bin : kCitationBins) {
      out << std::setw(12) << to_string(bin);
      for (std::size_t i = 0; i < table.periods.size(); ++i) {
        const auto cell = table.cell(i, bin);
        out << std::setw(18) << (cell ? format_fixed(cell->mean_cfdi, 3) + " (" + std::to_string(cell->papers) + ")" : "-");
      }
      out << '\n';
    }
    out << "papers without outgoing citations: " << table.excluded_no_outgoing << '\n';
    return kOk;
  }
  if (a.mode == "distribution") {
    if (!out_dir) throw UsageError("distribution mode is outgoing only");
    const auto h = cfdi_distribution(index, PaperLabels::top_level(index), target.scope);
    const auto path = output_path(c, a.output, export_filename("cfdi-distribution", target.name, std::nullopt, "json"));
    write_text_file(path, histogram_json(h).dump(2) + "\n");
    out << "papers " << h.total << ", excluded " << h.excluded << '\n' << "wrote " << path.string() << '\n';
    return kOk;
  }

  const FlowTensor t = top_tensor(index, c, target.focal);
  if (a.mode == "overall") {
    const auto counts = out_dir ? outgoing_counts(t, target.node, years) : incoming_counts(t, target.node, years);
    out << "scope      " << target.name << '\n'
        << "direction  " << a.direction << '\n'
        << "years      " << years_label(years) << '\n'
        << "citations  " << counts.total() << '\n'
        << "cfdi       " << format_fixed(cfdi(counts), 3) << '\n';
    return kOk;
  }
  if (a.mode == "diachronic") {
    MetricSpec spec;
    spec.metric = out_dir ? "cfdi_out" : "cfdi_in";
    spec.node = target.node;
    spec.scope_name = target.name;
    const auto table = diachronic_series(spec, {&index, &t, target.scope}, series_range(t, a.from, a.to), a.smooth);
    emit_series(table, c, a.output, out);
    return kOk;
  }
  throw UsageError("mode must be 'overall', 'diachronic', 'bins' or 'distribution'");
}

int cmd_rcp(const Common& c, const RcpArgs& a, std::ostream& out) {
  const Target target = parse_target(a.focal);
  const bool out_dir = outgoing(a.direction);
  const YearFilter years = parse_years(a.years);
  const CorpusIndex index = open_index(c);
  const FlowTensor t = top_tensor(index, c, target.focal);
  const RcpVector r = out_dir ? orcp(t, target.node, years) : ircp(t, target.node, years);

  const auto& scheme = FieldScheme::top_level();
  std::ostringstream csv;
  csv << "field,pp\n";
  out << (out_dir ? "orcp" : "ircp") << "  focal " << target.name << "  years " << years_label(years) << '\n';
  out << std::left << std::setw(34) << "field" << std::right << std::setw(8) << "pp" << '\n';
  std::size_t hidden = 0;
  for (int f = 0; f < scheme.size(); ++f) {
    const FieldId id{static_cast<std::uint8_t>(f)};
    const bool excluded = std::find(r.excluded_fields.begin(), r.excluded_fields.end(), id) != r.excluded_fields.end();
    const std::string pp = format_percent(r.score(id));
    csv << '"' << scheme.display_name(id) << "\"," << pp << '\n';
    if (!a.all && excluded && pp == "0.0") {
      ++hidden;
      continue;
    }
    out << std::left << std::setw(34) << scheme.display_name(id) << std::right << std::setw(8) << pp << '\n';
  }
  if (!r.excluded_fields.empty()) {
    out << r.excluded_fields.size() << " fields without outgoing citations left out of the average";
    if (hidden) out << " (" << hidden << " rows at 0.0 hidden, --all shows them)";
    out << '\n';
  }
  if (!a.output.empty()) write_text_file(output_path(c, a.output, ""), csv.str());
  return kOk;
}

int cmd_series(const Common& c, const SeriesArgs& a, const std::string& metric, std::ostream& out) {
  const Target target = parse_target(a.scope);
  const CorpusIndex index = open_index(c);
  const FlowTensor t = top_tensor(index, c, target.focal);
  if (metric == "intra_pct") {
    out << "# overall " << format_percent(intra_field_pct(t, target.node)) << '\n';
  } else {
    out << "# overall " << format_fixed(mean_fields_per_paper(index, target.scope), 3) << '\n';
  }
  MetricSpec spec;
  spec.metric = metric;
  spec.node = target.node;
  spec.scope_name = target.name;
  const auto table = diachronic_series(spec, {&index, &t, target.scope}, series_range(t, a.from, a.to), a.smooth);
  emit_series(table, c, a.output, out);
  return kOk;
}

int cmd_subfields(const Common& c, const SubfieldArgs& a, std::ostream& out) {
  if (a.bigrams == 0 && a.analysis.empty()) throw UsageError("nothing to do: pass --bigrams and/or --analysis");
  const YearFilter years = parse_years(a.years);
  const CorpusIndex index = open_index(c);

  if (a.bigrams > 0) {
    Stopwords stopwords;
    if (!a.stopwords.empty()) stopwords = Stopwords::load(a.stopwords);
    std::vector<std::string> titles;
    for (PaperIdx p = 0; p < index.paper_count(); ++p) {
      if (index.is_nlp(p) && admits(years, index.year(p))) titles.emplace_back(index.title(p));
    }
    out << "frequency\tbigram\n";
    for (const auto& b : top_bigrams(titles, a.bigrams, a.stopwords.empty() ? nullptr : &stopwords)) {
      out << b.frequency << '\t' << b.bigram << '\n';
    }
  }
  if (a.analysis.empty()) return kOk;
  if (a.lexicon.empty()) throw UsageError("--analysis needs --lexicon");
  const auto lexicon = SubfieldLexicon::load(a.lexicon);
  const PaperLabels labels = classify_corpus(index, lexicon);
  const auto& scheme = FieldScheme::nlp_subfields();

  std::string text;
  if (a.analysis == "cs" || a.analysis == "noncs") {
    const auto m = subfield_flow_matrix(index, labels,
                                        a.analysis == "cs" ? SubfieldTarget::CsSubfields : SubfieldTarget::NonCsFields,
                                        years);
    text = heatmap_csv(m.percent, m.row_labels(), m.column_labels(), "subfield");
    for (FieldId f : m.omitted) out << "# omitted (no citations): " << scheme.display_name(f) << '\n';
  } else if (a.analysis == "cfdi-delta") {
    std::ostringstream s;
    s << "subfield,delta\n";
    for (const auto& [f, d] : subfield_cfdi_delta(index, labels, years)) {
      s << '"' << scheme.display_name(f) << "\"," << format_fixed(d, 3) << '\n';
    }
    text = s.str();
  } else if (a.analysis == "intra") {
    std::ostringstream s;
    s << "subfield,intra_pct\n";
    for (int f = 0; f < scheme.size(); ++f) {
      const FieldId id{static_cast<std::uint8_t>(f)};
      try {
        s << '"' << scheme.display_name(id) << "\"," << format_percent(subfield_intra_pct(index, labels, id, years))
          << '\n';
      } catch (const UndefinedMetricError&) {
      }
    }
    text = s.str();
  } else {
    throw UsageError("analysis must be 'cs', 'noncs', 'cfdi-delta' or 'intra'");
  }
  out << text;
  if (!a.output.empty()) write_text_file(output_path(c, a.output, ""), text);
  return kOk;
}

s2::ClientConfig client_config(const std::string& cache_dir, double rps) {
  s2::ClientConfig config;
  s2::apply_environment(config);
  if (!cache_dir.empty()) config.cache_dir = cache_dir;
  config.requests_per_second = rps;
  return config;
}

std::optional<CfdiHistogram> read_histogram(const std::string& path) {
  if (path.empty()) return std::nullopt;
  std::ifstream in(path);
  if (!in) throw Error("cannot read histogram " + path);
  return histogram_from_json(nlohmann::json::parse(in));
}

int cmd_diversity(const DiversityArgs& a, std::ostream& out) {
  std::optional<s2::EntityKind> hint;
  if (!a.kind.empty()) {
    hint = s2::parse_entity_kind(a.kind);
    if (!hint) throw UsageError("kind must be 'paper', 'author' or 'venue'");
  }
  const s2::EntityRef ref = s2::resolve_entity(a.id, hint);
  const auto histogram = read_histogram(a.histogram);
  auto transport = s2::make_http_transport(a.base_url);
  s2::SystemClock clock;
  s2::Client client(client_config(a.cache_dir, a.rps), *transport, clock);
  const auto report = s2::entity_diversity(ref, client, histogram ? &*histogram : nullptr);
  if (a.json) {
    out << s2::report_json(report).dump(2) << '\n';
    return kOk;
  }
  const auto& scheme = FieldScheme::top_level();
  out << "entity      " << s2::to_string(ref.kind) << ' ' << ref.id << '\n'
      << "papers      " << report.papers.size() << '\n'
      << "references  " << report.references << " (" << report.unlabeled_references << " unlabeled)\n"
      << "cfdi        " << (report.cfdi ? format_fixed(*report.cfdi, 3) : std::string("undefined")) << '\n';
  if (report.percentile) out << "percentile  " << format_percent(*report.percentile) << '\n';
  if (!report.complete) out << "note        upstream results were truncated\n";
  for (std::size_t f = 0; f < report.outgoing.size(); ++f) {
    if (report.outgoing[f] == 0) continue;
    out << "  " << std::left << std::setw(32) << scheme.display_name({static_cast<std::uint8_t>(f)})
        << report.outgoing[f] << '\n';
  }
  return kOk;
}

int cmd_serve(const ServeArgs& a, std::ostream& out) {
  auto transport = s2::make_http_transport(a.base_url);
  s2::SystemClock clock;
  s2::Client client(client_config(a.cache_dir, a.rps), *transport, clock);
  s2::DiversityService service(client, read_histogram(a.histogram));
  s2::ServiceServer server(service);
  const int port = server.bind({a.host, a.port});
  out << "listening on http://" << a.host << ':' << port << std::endl;
  server.listen();
  return kOk;
}

// --- config file ---

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t n = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++n;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(n) + ": expected key=value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

bool given(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

/// Appends config values for options the command line leaves unset.
std::vector<std::string> with_config(CLI::App& app, std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  CLI::App* sub = nullptr;
  for (const auto& a : args) {
    if (auto* s = app.get_subcommand_no_throw(a)) {
      sub = s;
      break;
    }
  }
  for (const auto& [key, value] : read_config(path)) {
    const std::string flag = "--" + key;
    if (key == "config" || given(args, flag)) continue;
    const CLI::Option* opt = sub ? sub->get_option_no_throw(flag) : nullptr;
    if (!opt) opt = app.get_option_no_throw(flag);
    if (!opt) continue;  // keys for other subcommands
    if (opt->get_expected_min() == 0) {
      if (value == "true" || value == "1" || value == "yes") args.push_back(flag);
    } else {
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"citefield: citation-field influence metrics over paper and citation dumps", "citefield"};
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("--config", common.config, "flat key=value file; command-line flags take precedence");
  app.add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--index", common.index, "saved corpus index")->capture_default_str();
  app.add_option("--out-dir", common.out_dir, "directory for exported files")->capture_default_str();
  app.add_option("--year-axis", common.year_axis, "bucket citations by the citing or cited paper's year")
      ->check(CLI::IsMember({"citing", "cited"}))
      ->capture_default_str();

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "build and save the corpus index, print dataset statistics");
  ingest_cmd->add_option("--papers", ingest.papers, "paper metadata JSONL")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--edges", ingest.edges, "citation edge JSONL")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_flag("--strict", ingest.strict, "fail on the first malformed line");

  FlowsArgs flows;
  auto* flows_cmd = app.add_subcommand("flows", "export citation flows around a focal scope");
  flows_cmd->add_option("--focal", flows.focal, "nlp, non-nlp, all or a field name")->capture_default_str();
  flows_cmd->add_option("--direction", flows.direction, "out, in or both")->capture_default_str();
  flows_cmd->add_option("--format", flows.format, "sankey or heatmap")->capture_default_str();
  flows_cmd->add_option("--years", flows.years, "YYYY or YYYY-YYYY");
  flows_cmd->add_option("--denominator", flows.denominator, "slice, source or target (sankey)")->capture_default_str();
  flows_cmd->add_option("--output", flows.output, "output file");

  CfdiArgs cfdi_args;
  auto* cfdi_cmd = app.add_subcommand("cfdi", "citation field diversity index");
  cfdi_cmd->add_option("--scope", cfdi_args.scope, "nlp, non-nlp, all or a field name")->capture_default_str();
  cfdi_cmd->add_option("--direction", cfdi_args.direction, "out or in")->capture_default_str();
  cfdi_cmd->add_option("--mode", cfdi_args.mode, "overall, diachronic, bins or distribution")->capture_default_str();
  cfdi_cmd->add_option("--years", cfdi_args.years, "YYYY or YYYY-YYYY (overall)");
  cfdi_cmd->add_option("--from", cfdi_args.from, "first year of a series");
  cfdi_cmd->add_option("--to", cfdi_args.to, "last year of a series");
  cfdi_cmd->add_flag("--smooth", cfdi_args.smooth, "add a 3-year centered moving average");
  cfdi_cmd->add_option("--output", cfdi_args.output, "output file (.csv or .json)");

  RcpArgs rcp;
  auto* rcp_cmd = app.add_subcommand("rcp", "relative citational prominence (outgoing or incoming)");
  rcp_cmd->add_option("--focal", rcp.focal, "nlp, non-nlp, all or a field name")->capture_default_str();
  rcp_cmd->add_option("--direction", rcp.direction, "out or in")->capture_default_str();
  rcp_cmd->add_option("--years", rcp.years, "YYYY or YYYY-YYYY");
  rcp_cmd->add_flag("--all", rcp.all, "list every field");
  rcp_cmd->add_option("--output", rcp.output, "CSV output file");

  SeriesArgs insularity, interdisciplinarity;
  auto add_series = [&](CLI::App* cmd, SeriesArgs& s) {
    cmd->add_option("--scope", s.scope, "nlp, non-nlp, all or a field name")->capture_default_str();
    cmd->add_option("--from", s.from, "first year");
    cmd->add_option("--to", s.to, "last year");
    cmd->add_flag("--smooth", s.smooth, "add a 3-year centered moving average");
    cmd->add_option("--output", s.output, "output file (.csv or .json)");
  };
  auto* insularity_cmd = app.add_subcommand("insularity", "intra-field citation percentage per year");
  add_series(insularity_cmd, insularity);
  auto* interdisc_cmd = app.add_subcommand("interdisciplinarity", "mean fields per paper per year");
  add_series(interdisc_cmd, interdisciplinarity);

  SubfieldArgs sub;
  auto* sub_cmd = app.add_subcommand("subfields", "title bigrams for lexicon building and NLP-subfield analyses");
  sub_cmd->add_option("--bigrams", sub.bigrams, "print the top-k title bigrams of NLP papers");
  sub_cmd->add_option("--stopwords", sub.stopwords, "stopword list for bigram filtering")->check(CLI::ExistingFile);
  sub_cmd->add_option("--lexicon", sub.lexicon, "bigram to subfield TSV")->check(CLI::ExistingFile);
  sub_cmd->add_option("--analysis", sub.analysis, "cs, noncs, cfdi-delta or intra");
  sub_cmd->add_option("--years", sub.years, "YYYY or YYYY-YYYY");
  sub_cmd->add_option("--output", sub.output, "output file");

  DiversityArgs div;
  auto* div_cmd = app.add_subcommand("paper-diversity", "CFDI of a paper, author or venue from the scholarly API");
  div_cmd->add_option("id", div.id, "paper id or URL, author:ID, venue:NAME")->required();
  div_cmd->add_option("--kind", div.kind, "paper, author or venue");
  div_cmd->add_option("--base-url", div.base_url, "API base URL")->capture_default_str();
  div_cmd->add_option("--histogram", div.histogram, "corpus CFDI histogram JSON (cfdi --mode distribution)")
      ->check(CLI::ExistingFile);
  div_cmd->add_option("--cache-dir", div.cache_dir, "response cache (default: $CITEFIELD_CACHE_DIR)");
  div_cmd->add_option("--rps", div.rps, "upstream requests per second")->check(CLI::PositiveNumber);
  div_cmd->add_flag("--json", div.json, "print the service JSON");

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "run the diversity lookup HTTP service");
  serve_cmd->add_option("--host", serve.host, "bind address")->capture_default_str();
  serve_cmd->add_option("--port", serve.port, "port (0 picks one)")->capture_default_str();
  serve_cmd->add_option("--base-url", serve.base_url, "API base URL")->capture_default_str();
  serve_cmd->add_option("--histogram", serve.histogram, "corpus CFDI histogram JSON")->check(CLI::ExistingFile);
  serve_cmd->add_option("--cache-dir", serve.cache_dir, "response cache (default: $CITEFIELD_CACHE_DIR)");
  serve_cmd->add_option("--rps", serve.rps, "upstream requests per second")->check(CLI::PositiveNumber);

  auto help_of = [&]() {
    const auto subs = app.get_subcommands();
    return subs.empty() ? app.help() : subs.front()->help();
  };
  try {
    if (!args.empty() && args.front().rfind("-", 0) != 0 && !app.get_subcommand_no_throw(args.front())) {
      throw UsageError("unknown subcommand '" + args.front() + "'\n\n" + app.help());
    }
    auto argv = with_config(app, args);
    std::reverse(argv.begin(), argv.end());
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << help_of();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << help_of();
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (ingest_cmd->parsed()) return cmd_ingest(common, ingest, out, err);
    if (flows_cmd->parsed()) return cmd_flows(common, flows, out);
    if (cfdi_cmd->parsed()) return cmd_cfdi(common, cfdi_args, out);
    if (rcp_cmd->parsed()) return cmd_rcp(common, rcp, out);
    if (insularity_cmd->parsed()) return cmd_series(common, insularity, "intra_pct", out);
    if (interdisc_cmd->parsed()) return cmd_series(common, interdisciplinarity, "mean_fields", out);
    if (sub_cmd->parsed()) return cmd_subfields(common, sub, out);
    if (div_cmd->parsed()) return cmd_diversity(div, out);
    if (serve_cmd->parsed()) return cmd_serve(serve, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const s2::ResolutionError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  err << app.help();
  return kUsage;
}

}  // namespace citefield::cli
