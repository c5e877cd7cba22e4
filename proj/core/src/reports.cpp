#include "citefield/reports.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "citefield/errors.hpp"
#include "citefield/metrics.hpp"

namespace citefield {

using nlohmann::ordered_json;

double round_one_decimal(double value) {
  const double scaled = std::fabs(value) * 10.0;
  double r = std::floor(scaled + 0.5 + 1e-9) / 10.0;
  r = std::copysign(r, value);
  return r == 0.0 ? 0.0 : r;
}

std::string format_percent(double value) { return format_fixed(round_one_decimal(value), 1); }

std::string format_fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  std::string s(buf);
  // "-0.000" -> "0.000"
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string export_filename(std::string_view metric, std::string_view scope, const YearFilter& years,
                            std::string_view ext) {
  std::string y = years ? std::to_string(years->first) + "-" + std::to_string(years->last) : "all";
  std::string name;
  name.append(metric).append("_").append(scope).append("_").append(y).append(".").append(ext);
  for (auto& c : name) {
    if (c == ' ' || c == '/' || c == '\'') c = '-';
  }
  return name;
}

// --- series ---

namespace {

const std::map<std::string, SeriesUnit>& metric_units() {
  static const std::map<std::string, SeriesUnit> units = {
      {"outgoing_share", SeriesUnit::Percent}, {"incoming_share", SeriesUnit::Percent},
      {"cfdi_out", SeriesUnit::Index},         {"cfdi_in", SeriesUnit::Index},
      {"intra_pct", SeriesUnit::Percent},      {"mean_fields", SeriesUnit::Index},
  };
  return units;
}

std::optional<double> metric_value(const MetricSpec& spec, const SeriesInputs& in, int year) {
  const YearFilter y = YearRange{year, year};
  auto need_tensor = [&]() -> const FlowTensor& {
    if (!in.tensor) throw std::invalid_argument("metric \"" + spec.metric + "\" needs a flow tensor");
    return *in.tensor;
  };
  try {
    if (spec.metric == "outgoing_share" || spec.metric == "incoming_share") {
      const auto& t = need_tensor();
      const bool out = spec.metric == "outgoing_share";
      std::uint64_t num = out ? t.row_total(spec.node, spec.numerator, y) : t.column_total(spec.node, spec.numerator, y);
      std::uint64_t den =
          out ? t.row_total(spec.node, spec.denominator, y) : t.column_total(spec.node, spec.denominator, y);
      if (den == 0) return std::nullopt;
      return 100.0 * static_cast<double>(num) / static_cast<double>(den);
    }
    if (spec.metric == "cfdi_out") return cfdi(outgoing_counts(need_tensor(), spec.node, y));
    if (spec.metric == "cfdi_in") return cfdi(incoming_counts(need_tensor(), spec.node, y));
    if (spec.metric == "intra_pct") return intra_field_pct(need_tensor(), spec.node, y);
    if (spec.metric == "mean_fields") {
      if (!in.index) throw std::invalid_argument("metric \"mean_fields\" needs a corpus index");
      return mean_fields_per_paper(*in.index, in.scope, y);
    }
  } catch (const UndefinedMetricError&) {
    return std::nullopt;
  }
  throw std::invalid_argument("unknown metric \"" + spec.metric + "\"");
}

double rounded(const SeriesTable& t, double v) { return t.unit == SeriesUnit::Percent ? round_one_decimal(v) : v; }

std::string formatted(const SeriesTable& t, double v) {
  return t.unit == SeriesUnit::Percent ? format_percent(v) : format_fixed(v, 4);
}

}  // namespace

void validate_metric(const std::string& metric) {
  if (!metric_units().count(metric)) throw std::invalid_argument("unknown metric \"" + metric + "\"");
}

SeriesTable diachronic_series(const MetricSpec& spec, const SeriesInputs& inputs, YearRange years, bool smoothing) {
  validate_metric(spec.metric);
  SeriesTable table;
  table.metric = spec.metric;
  table.scope = spec.scope_name;
  table.denominator = spec.denominator_name;
  table.unit = metric_units().at(spec.metric);
  table.smoothed = smoothing;

  std::map<int, double> raw;
  for (int y = years.first; y <= years.last; ++y) {
    if (auto v = metric_value(spec, inputs, y)) raw[y] = *v;
  }
  std::map<int, double> smooth;
  if (smoothing) smooth = moving_average(raw, 3);
  for (const auto& [y, v] : raw) {
    SeriesRow row{y, v, std::nullopt};
    if (smoothing) row.smoothed = smooth.at(y);
    table.rows.push_back(row);
  }
  return table;
}

void write_series_csv(const SeriesTable& table, std::ostream& out) {
  out << "year,value";
  if (table.smoothed) out << ",smoothed";
  out << '\n';
  for (const auto& r : table.rows) {
    out << r.year << ',' << formatted(table, r.value);
    if (table.smoothed) out << ',' << formatted(table, *r.smoothed);
    out << '\n';
  }
}

ordered_json series_json(const SeriesTable& table) {
  ordered_json j;
  j["schema_version"] = kExportSchemaVersion;
  j["metric"] = table.metric;
  j["scope"] = table.scope;
  j["denominator"] = table.denominator;
  j["unit"] = table.unit == SeriesUnit::Percent ? "percent" : "index";
  j["smoothed"] = table.smoothed;
  j["rows"] = ordered_json::array();
  for (const auto& r : table.rows) {
    ordered_json row;
    row["year"] = r.year;
    row["value"] = rounded(table, r.value);
    if (table.smoothed) row["smoothed"] = rounded(table, *r.smoothed);
    j["rows"].push_back(std::move(row));
  }
  return j;
}

// --- Sankey ---

SankeyExport sankey_export(const FlowSlice& slice, SankeyDenominator denominator, const std::string& focal_label) {
  SankeyExport s;
  switch (denominator) {
    case SankeyDenominator::SliceTotal: s.denominator = "slice_total"; break;
    case SankeyDenominator::SourceTotal: s.denominator = "source_total"; break;
    case SankeyDenominator::TargetTotal: s.denominator = "target_total"; break;
  }
  if (slice.total == 0) {
    s.warnings.push_back("empty flow slice: no citations in scope");
    return s;
  }
  auto side = [&](const std::string& label, const char* def) {
    return !focal_label.empty() && label == focal_label ? std::string("focal") : std::string(def);
  };
  for (const auto& l : slice.src_labels) s.nodes.push_back({l, side(l, "source")});
  const std::size_t offset = s.nodes.size();
  for (const auto& l : slice.tgt_labels) s.nodes.push_back({l, side(l, "target")});

  for (std::size_t i = 0; i < slice.matrix.size(); ++i) {
    for (std::size_t j = 0; j < slice.matrix[i].size(); ++j) {
      const auto c = slice.matrix[i][j];
      if (c == 0) continue;
      std::uint64_t den = denominator == SankeyDenominator::SliceTotal    ? slice.total
                          : denominator == SankeyDenominator::SourceTotal ? slice.row_totals[i]
                                                                          : slice.col_totals[j];
      s.links.push_back({i, offset + j, c, 100.0 * static_cast<double>(c) / static_cast<double>(den)});
    }
  }
  return s;
}

SankeyExport merge_sankey(const SankeyExport& a, const SankeyExport& b) {
  SankeyExport out;
  out.denominator = a.denominator == b.denominator ? a.denominator : a.denominator + "+" + b.denominator;
  out.warnings = a.warnings;
  out.warnings.insert(out.warnings.end(), b.warnings.begin(), b.warnings.end());
  std::map<std::pair<std::string, std::string>, std::size_t> ids;
  auto intern = [&](const SankeyNode& n) {
    auto [it, fresh] = ids.emplace(std::make_pair(n.label, n.side), out.nodes.size());
    if (fresh) out.nodes.push_back(n);
    return it->second;
  };
  for (const auto* part : {&a, &b}) {
    for (const auto& l : part->links) {
      out.links.push_back({intern(part->nodes[l.from]), intern(part->nodes[l.to]), l.count, l.percentage});
    }
  }
  return out;
}

ordered_json sankey_json(const SankeyExport& s) {
  ordered_json j;
  j["schema_version"] = kExportSchemaVersion;
  j["denominator"] = s.denominator;
  j["nodes"] = ordered_json::array();
  for (const auto& n : s.nodes) j["nodes"].push_back({{"label", n.label}, {"side", n.side}});
  j["links"] = ordered_json::array();
  for (const auto& l : s.links) {
    j["links"].push_back(
        {{"from", l.from}, {"to", l.to}, {"count", l.count}, {"percentage", round_one_decimal(l.percentage)}});
  }
  if (!s.warnings.empty()) j["warnings"] = s.warnings;
  return j;
}

// --- heatmap ---

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

}  // namespace

std::string heatmap_csv(const std::vector<std::vector<double>>& matrix, const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels, std::string_view corner) {
  if (matrix.size() != row_labels.size()) throw std::invalid_argument("heatmap: row label count does not match matrix");
  for (const auto& row : matrix) {
    if (row.size() != col_labels.size()) throw std::invalid_argument("heatmap: ragged matrix");
  }
  std::string out = csv_field(corner);
  for (const auto& c : col_labels) out += "," + csv_field(c);
  out += '\n';
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    out += csv_field(row_labels[i]);
    for (double v : matrix[i]) out += "," + format_percent(v);
    out += '\n';
  }
  return out;
}

HeatmapGrid parse_heatmap_csv(std::string_view csv) {
  HeatmapGrid g;
  std::size_t pos = 0;
  bool header = true;
  while (pos < csv.size()) {
    auto nl = csv.find('\n', pos);
    auto line = csv.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? csv.size() : nl + 1;
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (header) {
      g.col_labels.assign(cells.begin() + 1, cells.end());
      header = false;
      continue;
    }
    if (cells.size() != g.col_labels.size() + 1) throw ParseError("heatmap row width does not match header");
    g.row_labels.push_back(cells[0]);
    std::vector<double> row;
    for (std::size_t i = 1; i < cells.size(); ++i) row.push_back(std::stod(cells[i]));
    g.values.push_back(std::move(row));
  }
  return g;
}

// --- distribution ---

std::size_t CfdiHistogram::bin_of(double cfdi) {
  if (!(cfdi >= 0.0)) return 0;
  auto b = static_cast<std::size_t>(std::floor(cfdi * 20.0));
  return std::min(b, kBins - 1);
}

void CfdiHistogram::add(double cfdi) {
  ++counts[bin_of(cfdi)];
  ++total;
}

std::optional<double> CfdiHistogram::percentile(double cfdi) const {
  if (total == 0) return std::nullopt;
  const std::size_t b = bin_of(cfdi);
  std::uint64_t below = 0;
  for (std::size_t i = 0; i < b; ++i) below += counts[i];
  return 100.0 * (static_cast<double>(below) + 0.5 * static_cast<double>(counts[b])) / static_cast<double>(total);
}

CfdiHistogram cfdi_distribution(const CorpusIndex& index, const PaperLabels& target_labels, const PaperScope& scope) {
  CfdiHistogram h;
  h.scope = scope.name();
  for (PaperIdx p = 0; p < index.paper_count(); ++p) {
    if (!scope.contains(index, p)) continue;
    if (auto v = paper_outgoing_cfdi(index, target_labels, p)) {
      h.add(*v);
    } else {
      ++h.excluded;
    }
  }
  return h;
}

ordered_json histogram_json(const CfdiHistogram& h) {
  ordered_json j;
  j["schema_version"] = kExportSchemaVersion;
  j["scope"] = h.scope;
  j["bin_width"] = CfdiHistogram::kBinWidth;
  j["total"] = h.total;
  j["excluded"] = h.excluded;
  j["bins"] = ordered_json::array();
  for (std::size_t i = 0; i < CfdiHistogram::kBins; ++i) {
    j["bins"].push_back({{"lo", static_cast<double>(i) / 20.0},
                         {"hi", static_cast<double>(i + 1) / 20.0},
                         {"count", h.counts[i]}});
  }
  return j;
}

CfdiHistogram histogram_from_json(const nlohmann::json& j) {
  CfdiHistogram h;
  try {
    if (j.at("schema_version").get<int>() != kExportSchemaVersion) throw ParseError("unsupported histogram schema_version");
    h.scope = j.value("scope", std::string("nlp"));
    h.excluded = j.value("excluded", std::uint64_t{0});
    const auto& bins = j.at("bins");
    if (!bins.is_array() || bins.size() != CfdiHistogram::kBins) throw ParseError("histogram must have 20 bins");
    for (std::size_t i = 0; i < CfdiHistogram::kBins; ++i) {
      h.counts[i] = bins[i].at("count").get<std::uint64_t>();
      h.total += h.counts[i];
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed histogram: ") + e.what());
  }
  return h;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace citefield
