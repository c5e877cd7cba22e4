#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "citefield/corpus.hpp"
#include "citefield/flowgraph.hpp"
#include "citefield/scope.hpp"

namespace citefield {

inline constexpr int kExportSchemaVersion = 1;

/// Rounds half away from zero to one decimal, absorbing binary noise below 1e-9.
double round_one_decimal(double value);
/// "12.3"; never "-0.0".
std::string format_percent(double value);
/// Fixed-point with `digits` decimals.
std::string format_fixed(double value, int digits);

/// `<metric>_<scope>_<years>.<ext>`; years is "all" or "first-last".
std::string export_filename(std::string_view metric, std::string_view scope, const YearFilter& years,
                            std::string_view ext);

// --- diachronic series ---

enum class SeriesUnit { Percent, Index };

struct SeriesRow {
  int year = 0;
  double value = 0.0;
  std::optional<double> smoothed;
};

struct SeriesTable {
  std::string metric;
  std::string scope;
  std::string denominator;
  SeriesUnit unit = SeriesUnit::Percent;
  bool smoothed = false;
  std::vector<SeriesRow> rows;  // strictly increasing years
};

/// Names a per-year metric over the flow tensor or the corpus.
///
///   outgoing_share  100 * C[node -> numerator] / C[node -> denominator]
///   incoming_share  100 * C[numerator -> node] / C[denominator -> node]
///   cfdi_out        CFDI of node's row;  cfdi_in  CFDI of node's column
///   intra_pct       intra_field_pct(node)
///   mean_fields     mean_fields_per_paper(scope)
struct MetricSpec {
  std::string metric;
  FlowNode node = FlowNode::focal();
  FieldSet numerator;
  FieldSet denominator;
  std::string scope_name = "nlp";
  std::string denominator_name = "all";
};

/// Throws std::invalid_argument for unknown metric names.
void validate_metric(const std::string& metric);

struct SeriesInputs {
  const CorpusIndex* index = nullptr;
  const FlowTensor* tensor = nullptr;
  PaperScope scope = PaperScope::nlp();
};

/// One row per year in `years` where the metric is defined.
SeriesTable diachronic_series(const MetricSpec& spec, const SeriesInputs& inputs, YearRange years, bool smoothing);

void write_series_csv(const SeriesTable& table, std::ostream& out);
nlohmann::ordered_json series_json(const SeriesTable& table);

// --- Sankey ---

enum class SankeyDenominator { SliceTotal, SourceTotal, TargetTotal };

struct SankeyNode {
  std::string label;
  std::string side;  // "source", "focal" or "target"
};

struct SankeyLink {
  std::size_t from = 0;
  std::size_t to = 0;
  std::uint64_t count = 0;
  double percentage = 0.0;
};

struct SankeyExport {
  std::vector<SankeyNode> nodes;
  std::vector<SankeyLink> links;
  std::string denominator;
  std::vector<std::string> warnings;
};

/// Nodes for every slice label, links for every nonzero cell. Labels equal to
/// `focal_label` are placed on the focal side.
SankeyExport sankey_export(const FlowSlice& slice, SankeyDenominator denominator = SankeyDenominator::SliceTotal,
                           const std::string& focal_label = {});
/// Incoming and outgoing halves around the same focal node.
SankeyExport merge_sankey(const SankeyExport& a, const SankeyExport& b);
nlohmann::ordered_json sankey_json(const SankeyExport& s);

// --- heatmap ---

/// CSV grid with a header row, one-decimal cells. Throws std::invalid_argument on ragged input.
std::string heatmap_csv(const std::vector<std::vector<double>>& matrix, const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels, std::string_view corner = "label");

struct HeatmapGrid {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<std::vector<double>> values;
};
HeatmapGrid parse_heatmap_csv(std::string_view csv);

// --- CFDI distribution ---

struct CfdiHistogram {
  static constexpr double kBinWidth = 0.05;
  static constexpr std::size_t kBins = 20;

  std::array<std::uint64_t, kBins> counts{};
  std::uint64_t total = 0;
  std::uint64_t excluded = 0;  // papers in scope without outgoing citations
  std::string scope = "nlp";

  static std::size_t bin_of(double cfdi);
  void add(double cfdi);
  /// Percent of corpus papers below `cfdi`, counting half of its own bin.
  std::optional<double> percentile(double cfdi) const;
};

/// Histogram of per-paper outgoing CFDI over papers in scope.
CfdiHistogram cfdi_distribution(const CorpusIndex& index, const PaperLabels& target_labels,
                                const PaperScope& scope = PaperScope::nlp());
nlohmann::ordered_json histogram_json(const CfdiHistogram& h);
CfdiHistogram histogram_from_json(const nlohmann::json& j);

/// Writes `text` to `path` (creating parent directories).
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace citefield
