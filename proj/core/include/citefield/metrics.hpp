#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citefield/corpus.hpp"
#include "citefield/flowgraph.hpp"
#include "citefield/scope.hpp"

namespace citefield {

/// Citation counts per field, x_f, dense over a scheme.
struct FieldCountVector {
  std::vector<std::uint64_t> counts;

  std::uint64_t total() const;
  bool operator==(const FieldCountVector&) const = default;
};

/// Citation Field Diversity Index: 1 - sum_f (x_f / X)^2.
/// Throws UndefinedMetricError when X = 0.
double cfdi(std::span<const std::uint64_t> counts);
inline double cfdi(const FieldCountVector& v) { return cfdi(v.counts); }

/// Row of `src` over the target scheme.
FieldCountVector outgoing_counts(const FlowTensor& tensor, FlowNode src, const YearFilter& years = std::nullopt);
/// Column of `tgt` over the source scheme.
FieldCountVector incoming_counts(const FlowTensor& tensor, FlowNode tgt, const YearFilter& years = std::nullopt);

enum class RcpDirection { Outgoing, Incoming };

/// Relative citational prominence of a focal node towards every field, in
/// percentage points.
struct RcpVector {
  RcpDirection direction = RcpDirection::Outgoing;
  std::string focal_name;
  std::vector<double> scores;           // indexed by field id of the target scheme
  std::vector<FieldId> excluded_fields;  // dropped from the macro average: zero outgoing total

  double score(FieldId f) const { return scores.at(f.value); }
};

/// ORCP(f) = X(f) - Y(f) where X is the focal node's outgoing share to f and
/// Y the unweighted mean of every field's outgoing share to f. Fields with no
/// outgoing citations are left out of the mean. Requires a same-scheme tensor.
RcpVector orcp(const FlowTensor& tensor, FlowNode focal, const YearFilter& years = std::nullopt);
/// ORCP on the transposed tensor.
RcpVector ircp(const FlowTensor& tensor, FlowNode focal, const YearFilter& years = std::nullopt);

/// Share of a node's outgoing citations that stay inside it. For a field:
/// C[f][f] over its row; for the focal scope: edges focal -> focal over edges
/// leaving focal. Throws UndefinedMetricError on a zero denominator.
double intra_field_pct(const FlowTensor& tensor, FlowNode node, const YearFilter& years = std::nullopt);
/// Edge-level insularity of an arbitrary paper scope, bucketed by citing-paper year.
double intra_scope_pct(const CorpusIndex& index, const PaperScope& scope, const YearFilter& years = std::nullopt);

/// Mean number of top-level field labels over papers in scope published in `years`.
double mean_fields_per_paper(const CorpusIndex& index, const PaperScope& scope, const YearFilter& years = std::nullopt);

enum class CitationBin : std::uint8_t {
  Zero,
  From1To9,
  From10To49,
  From50To99,
  From100To499,
  From500To999,
  From1000To1999,
  From2000To4999,
  From5000,
};

inline constexpr std::array<CitationBin, 9> kCitationBins = {
    CitationBin::Zero,         CitationBin::From1To9,       CitationBin::From10To49,
    CitationBin::From50To99,   CitationBin::From100To499,   CitationBin::From500To999,
    CitationBin::From1000To1999, CitationBin::From2000To4999, CitationBin::From5000,
};

CitationBin assign_citation_bin(std::uint64_t citation_count);
std::string_view to_string(CitationBin bin);

/// Default grouping periods, made disjoint: 1965-1989, 1990-1999, 2000-2009, 2010-2020.
std::vector<YearRange> default_periods();

/// Outgoing field counts of a single paper under the multi-field rule.
FieldCountVector paper_outgoing_counts(const CorpusIndex& index, const PaperLabels& target_labels, PaperIdx p);
/// Outgoing CFDI of a single paper; empty when it has no labelled references.
std::optional<double> paper_outgoing_cfdi(const CorpusIndex& index, const PaperLabels& target_labels, PaperIdx p);

struct BinPeriodCell {
  double mean_cfdi = 0.0;
  std::uint64_t papers = 0;
};

struct BinPeriodTable {
  std::vector<YearRange> periods;
  /// Keyed by (period position, bin); absent keys are empty cells.
  std::map<std::pair<std::size_t, CitationBin>, BinPeriodCell> cells;
  std::uint64_t excluded_no_outgoing = 0;

  std::optional<BinPeriodCell> cell(std::size_t period, CitationBin bin) const;
};

/// Mean per-paper outgoing CFDI grouped by citation bin and publication period.
BinPeriodTable cfdi_by_bin_and_period(const CorpusIndex& index, const PaperLabels& target_labels,
                                      const PaperScope& scope, const std::vector<YearRange>& periods);

/// Centered moving average over `window` years (odd). Edges use the years
/// available inside the window; absent years are not filled in.
std::map<int, double> moving_average(const std::map<int, double>& series, int window = 3);

}  // namespace citefield
