#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "citefield/corpus.hpp"
#include "citefield/fields.hpp"
#include "citefield/scope.hpp"

namespace citefield {

/// A row or column of a flow tensor: one field of the scheme, or the focal
/// scope (e.g. NLP) when the tensor was built with one.
class FlowNode {
 public:
  static FlowNode field(FieldId id) { return FlowNode(id.value); }
  static FlowNode focal() { return FlowNode(kFocal); }

  bool is_focal() const { return value_ == kFocal; }
  FieldId field_id() const { return FieldId{static_cast<std::uint8_t>(value_)}; }
  bool operator==(const FlowNode&) const = default;

 private:
  static constexpr int kFocal = -1;
  explicit FlowNode(int v) : value_(v) {}
  int value_;
};

enum class YearAxis { CitingPaperYear, CitedPaperYear };

/// Citation counts indexed by (source node, target node, year).
///
/// Field cells follow the multi-field rule: an edge s -> t adds one to every
/// (f_s, f_t) with f_s in labels(s) and f_t in labels(t). The focal row counts
/// one per target label for each edge leaving the focal scope, the focal
/// column likewise for edges entering it. Edge-level focal counters are kept
/// separately for insularity.
class FlowTensor {
 public:
  FlowTensor(SchemeKind src_scheme, SchemeKind tgt_scheme, std::optional<std::string> focal_name = std::nullopt);

  const FieldScheme& src_scheme() const { return FieldScheme::get(src_scheme_); }
  const FieldScheme& tgt_scheme() const { return FieldScheme::get(tgt_scheme_); }
  bool has_focal() const { return focal_name_.has_value(); }
  const std::string& focal_name() const;
  std::string node_name(FlowNode node, bool source) const;

  std::uint64_t count(FlowNode src, FlowNode tgt, std::optional<int> year) const;
  std::uint64_t count(FlowNode src, FlowNode tgt, const YearFilter& years = std::nullopt) const;
  /// Sum over field x field cells only (focal row and column excluded).
  std::uint64_t total(const YearFilter& years = std::nullopt) const;
  /// Sum of `src`'s row over the target fields in `targets`.
  std::uint64_t row_total(FlowNode src, FieldSet targets, const YearFilter& years = std::nullopt) const;
  /// Sum of `tgt`'s column over the source fields in `sources`.
  std::uint64_t column_total(FlowNode tgt, FieldSet sources, const YearFilter& years = std::nullopt) const;

  /// Edges whose citing paper is in the focal scope.
  std::uint64_t focal_out_edges(const YearFilter& years = std::nullopt) const;
  /// Edges whose cited paper is in the focal scope.
  std::uint64_t focal_in_edges(const YearFilter& years = std::nullopt) const;
  /// Edges with both endpoints in the focal scope.
  std::uint64_t focal_self_edges(const YearFilter& years = std::nullopt) const;

  /// Edges admitted by the scopes but dropped because an endpoint has no label in its scheme.
  std::uint64_t unlabeled_edges() const { return unlabeled_edges_; }
  /// Edges seen with both endpoints in scope.
  std::uint64_t scoped_edges() const { return scoped_edges_; }

  /// Years (ascending) holding any count; unknown year is not listed.
  std::vector<int> years() const;

  void add(FlowNode src, FlowNode tgt, std::optional<int> year, std::uint64_t n = 1);
  /// Applies the attribution rule to one admitted edge.
  void add_edge(FieldSet src_labels, FieldSet tgt_labels, bool src_focal, bool tgt_focal, std::optional<int> year);
  FlowTensor transposed() const;
  /// Cell-wise sum. Shapes (schemes, focal presence) must match.
  FlowTensor& operator+=(const FlowTensor& other);
  bool operator==(const FlowTensor& other) const;

  std::string src_scope_name = "all";
  std::string tgt_scope_name = "all";

 private:
  static constexpr std::size_t kBuckets = kMaxYear - kMinYear + 2;  // slot 0 is unknown year
  static std::size_t bucket(std::optional<int> year);
  static std::optional<int> bucket_year(std::size_t b);

  std::size_t rows() const { return static_cast<std::size_t>(src_scheme().size()) + (has_focal() ? 1 : 0); }
  std::size_t cols() const { return static_cast<std::size_t>(tgt_scheme().size()) + (has_focal() ? 1 : 0); }
  std::size_t row_of(FlowNode n) const;
  std::size_t col_of(FlowNode n) const;
  template <typename F>
  void for_buckets(const YearFilter& years, F&& f) const;

  SchemeKind src_scheme_;
  SchemeKind tgt_scheme_;
  std::optional<std::string> focal_name_;
  std::vector<std::vector<std::uint64_t>> cells_;  // per bucket, rows() x cols(), empty when untouched
  std::array<std::uint64_t, kBuckets> focal_out_{};
  std::array<std::uint64_t, kBuckets> focal_in_{};
  std::array<std::uint64_t, kBuckets> focal_self_{};
  std::uint64_t unlabeled_edges_ = 0;
  std::uint64_t scoped_edges_ = 0;
};

struct FlowSpec {
  PaperScope src_scope = PaperScope::all();
  PaperScope tgt_scope = PaperScope::all();
  std::optional<PaperScope> focal;
  YearAxis year_axis = YearAxis::CitingPaperYear;
  unsigned threads = 1;
};

/// Aggregates every in-scope citation edge of `index`.
FlowTensor build_flow_tensor(const CorpusIndex& index, const PaperLabels& src_labels, const PaperLabels& tgt_labels,
                             const FlowSpec& spec = {});
/// Same-scheme tensor with labels read from the index (top-level or CS subfields).
FlowTensor build_flow_tensor(const CorpusIndex& index, SchemeKind scheme, const FlowSpec& spec = {});

struct FieldShare {
  FieldId field;
  std::uint64_t count = 0;
  double percent = 0.0;
};

/// Shares of one node's citations over a denominator field set. Empty when
/// the denominator is zero.
struct ShareTable {
  std::vector<FieldShare> rows;  // ascending field id, one per field in the denominator scope
  std::uint64_t denominator = 0;

  bool empty() const { return rows.empty(); }
  std::optional<double> percent(FieldId f) const;
};

/// Percent of `src`'s outgoing citations to each target field in `denominator_scope`.
ShareTable outgoing_shares(const FlowTensor& tensor, FlowNode src, FieldSet denominator_scope,
                           const YearFilter& years = std::nullopt);
/// Percent of `tgt`'s incoming citations from each source field in `denominator_scope`.
ShareTable incoming_shares(const FlowTensor& tensor, FlowNode tgt, FieldSet denominator_scope,
                           const YearFilter& years = std::nullopt);

/// Dense sub-matrix of a tensor with marginals, for Sankey and heatmap exports.
struct FlowSlice {
  std::vector<std::string> src_labels;
  std::vector<std::string> tgt_labels;
  std::vector<std::vector<std::uint64_t>> matrix;  // src x tgt
  std::vector<std::uint64_t> row_totals;
  std::vector<std::uint64_t> col_totals;
  std::uint64_t total = 0;
  YearFilter years;
};

FlowSlice flow_slice(const FlowTensor& tensor, const std::vector<FlowNode>& src, const std::vector<FlowNode>& tgt,
                     const YearFilter& years = std::nullopt);

/// Nodes for every field in `set`, ascending.
std::vector<FlowNode> field_nodes(FieldSet set);

}  // namespace citefield
