#include "citefield/metrics.hpp"

#include <numeric>
#include <stdexcept>

#include "citefield/errors.hpp"

namespace citefield {

std::uint64_t FieldCountVector::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

double cfdi(std::span<const std::uint64_t> counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw UndefinedMetricError("CFDI undefined: no citations");
  const double x = static_cast<double>(total);
  double sum_sq = 0.0;
  for (auto c : counts) {
    const double p = static_cast<double>(c) / x;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

FieldCountVector outgoing_counts(const FlowTensor& tensor, FlowNode src, const YearFilter& years) {
  FieldCountVector v;
  const int k = tensor.tgt_scheme().size();
  v.counts.reserve(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    v.counts.push_back(tensor.count(src, FlowNode::field(FieldId{static_cast<std::uint8_t>(f)}), years));
  }
  return v;
}

FieldCountVector incoming_counts(const FlowTensor& tensor, FlowNode tgt, const YearFilter& years) {
  FieldCountVector v;
  const int k = tensor.src_scheme().size();
  v.counts.reserve(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    v.counts.push_back(tensor.count(FlowNode::field(FieldId{static_cast<std::uint8_t>(f)}), tgt, years));
  }
  return v;
}

RcpVector orcp(const FlowTensor& tensor, FlowNode focal, const YearFilter& years) {
  if (tensor.src_scheme().kind() != tensor.tgt_scheme().kind()) {
    throw std::invalid_argument("relative citational prominence needs a same-scheme tensor");
  }
  const int k = tensor.tgt_scheme().size();
  const FieldSet all = tensor.tgt_scheme().all();
  auto node = [](int f) { return FlowNode::field(FieldId{static_cast<std::uint8_t>(f)}); };

  const std::uint64_t focal_total = tensor.row_total(focal, all, years);
  if (focal_total == 0) {
    throw UndefinedMetricError("relative citational prominence undefined: " + tensor.node_name(focal, true) +
                               " has no outgoing citations");
  }

  RcpVector out;
  out.focal_name = tensor.node_name(focal, true);
  std::vector<double> macro(static_cast<std::size_t>(k), 0.0);
  int n = 0;
  for (int i = 0; i < k; ++i) {
    const std::uint64_t row = tensor.row_total(node(i), all, years);
    if (row == 0) {
      out.excluded_fields.push_back(FieldId{static_cast<std::uint8_t>(i)});
      continue;
    }
    ++n;
    for (int f = 0; f < k; ++f) {
      macro[f] += static_cast<double>(tensor.count(node(i), node(f), years)) / static_cast<double>(row);
    }
  }
  out.scores.resize(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    const double x = static_cast<double>(tensor.count(focal, node(f), years)) / static_cast<double>(focal_total);
    const double y = n > 0 ? macro[f] / n : 0.0;
    out.scores[f] = 100.0 * (x - y);
  }
  return out;
}

RcpVector ircp(const FlowTensor& tensor, FlowNode focal, const YearFilter& years) {
  auto out = orcp(tensor.transposed(), focal, years);
  out.direction = RcpDirection::Incoming;
  return out;
}

double intra_field_pct(const FlowTensor& tensor, FlowNode node, const YearFilter& years) {
  std::uint64_t inside = 0, all = 0;
  if (node.is_focal()) {
    inside = tensor.focal_self_edges(years);
    all = tensor.focal_out_edges(years);
  } else {
    if (tensor.src_scheme().kind() != tensor.tgt_scheme().kind()) {
      throw std::invalid_argument("field insularity needs a same-scheme tensor");
    }
    inside = tensor.count(node, node, years);
    all = tensor.row_total(node, tensor.tgt_scheme().all(), years);
  }
  if (all == 0) throw UndefinedMetricError("intra-field percentage undefined: no outgoing citations");
  return 100.0 * static_cast<double>(inside) / static_cast<double>(all);
}

double intra_scope_pct(const CorpusIndex& index, const PaperScope& scope, const YearFilter& years) {
  std::uint64_t inside = 0, all = 0;
  for (PaperIdx p = 0; p < index.paper_count(); ++p) {
    if (!admits(years, index.year(p)) || !scope.contains(index, p)) continue;
    for (PaperIdx d : index.references(p)) {
      ++all;
      if (scope.contains(index, d)) ++inside;
    }
  }
  if (all == 0) {
    throw UndefinedMetricError("intra-field percentage undefined: scope \"" + scope.name() +
                               "\" has no outgoing citations");
  }
  return 100.0 * static_cast<double>(inside) / static_cast<double>(all);
}

double mean_fields_per_paper(const CorpusIndex& index, const PaperScope& scope, const YearFilter& years) {
  std::uint64_t papers = 0, labels = 0;
  for (PaperIdx p = 0; p < index.paper_count(); ++p) {
    if (!admits(years, index.year(p)) || !scope.contains(index, p)) continue;
    ++papers;
    labels += static_cast<std::uint64_t>(index.fields(p).size());
  }
  if (papers == 0) throw UndefinedMetricError("mean fields per paper undefined: no papers in scope \"" + scope.name() + "\"");
  return static_cast<double>(labels) / static_cast<double>(papers);
}

CitationBin assign_citation_bin(std::uint64_t c) {
  if (c == 0) return CitationBin::Zero;
  if (c <= 9) return CitationBin::From1To9;
  if (c <= 49) return CitationBin::From10To49;
  if (c <= 99) return CitationBin::From50To99;
  if (c <= 499) return CitationBin::From100To499;
  if (c <= 999) return CitationBin::From500To999;
  if (c <= 1999) return CitationBin::From1000To1999;
  if (c <= 4999) return CitationBin::From2000To4999;
  return CitationBin::From5000;
}

std::string_view to_string(CitationBin bin) {
  switch (bin) {
    case CitationBin::Zero: return "0";
    case CitationBin::From1To9: return "1-9";
    case CitationBin::From10To49: return "10-49";
    case CitationBin::From50To99: return "50-99";
    case CitationBin::From100To499: return "100-499";
    case CitationBin::From500To999: return "500-999";
    case CitationBin::From1000To1999: return "1000-1999";
    case CitationBin::From2000To4999: return "2000-4999";
    case CitationBin::From5000: return "5000+";
  }
  return "?";
}

std::vector<YearRange> default_periods() {
  return {{1965, 1989}, {1990, 1999}, {2000, 2009}, {2010, 2020}};
}

FieldCountVector paper_outgoing_counts(const CorpusIndex& index, const PaperLabels& target_labels, PaperIdx p) {
  FieldCountVector v;
  v.counts.assign(static_cast<std::size_t>(target_labels.scheme().size()), 0);
  for (PaperIdx d : index.references(p)) {
    target_labels.of(d).for_each([&](FieldId f) { ++v.counts[f.value]; });
  }
  return v;
}

std::optional<double> paper_outgoing_cfdi(const CorpusIndex& index, const PaperLabels& target_labels, PaperIdx p) {
  auto v = paper_outgoing_counts(index, target_labels, p);
  if (v.total() == 0) return std::nullopt;
  return cfdi(v);
}

std::optional<BinPeriodCell> BinPeriodTable::cell(std::size_t period, CitationBin bin) const {
  auto it = cells.find({period, bin});
  if (it == cells.end()) return std::nullopt;
  return it->second;
}

BinPeriodTable cfdi_by_bin_and_period(const CorpusIndex& index, const PaperLabels& target_labels,
                                      const PaperScope& scope, const std::vector<YearRange>& periods) {
  BinPeriodTable table;
  table.periods = periods;
  std::map<std::pair<std::size_t, CitationBin>, double> sums;
  for (PaperIdx p = 0; p < index.paper_count(); ++p) {
    if (!scope.contains(index, p)) continue;
    const auto year = index.year(p);
    if (!year) continue;
    std::optional<std::optional<double>> value;  // computed lazily, once per paper
    for (std::size_t i = 0; i < periods.size(); ++i) {
      if (!periods[i].contains(*year)) continue;
      if (!value) {
        value = paper_outgoing_cfdi(index, target_labels, p);
        if (!*value) ++table.excluded_no_outgoing;
      }
      if (!*value) break;
      const auto key = std::make_pair(i, assign_citation_bin(index.citation_count(p)));
      sums[key] += **value;
      ++table.cells[key].papers;
    }
  }
  for (auto& [key, cell] : table.cells) cell.mean_cfdi = sums[key] / static_cast<double>(cell.papers);
  return table;
}

std::map<int, double> moving_average(const std::map<int, double>& series, int window) {
  if (window < 1 || window % 2 == 0) throw std::invalid_argument("moving average window must be odd and >= 1");
  const int half = window / 2;
  std::map<int, double> out;
  for (const auto& [year, anchor] : series) {
    // deviations from the centre value, so a constant window returns that value exactly
    double sum = 0.0;
    int n = 0;
    for (auto it = series.lower_bound(year - half); it != series.end() && it->first <= year + half; ++it) {
      sum += it->second - anchor;
      ++n;
    }
    out[year] = anchor + sum / n;
  }
  return out;
}

}  // namespace citefield
