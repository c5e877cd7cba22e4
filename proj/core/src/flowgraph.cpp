#include "citefield/flowgraph.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

namespace citefield {

FlowTensor::FlowTensor(SchemeKind src_scheme, SchemeKind tgt_scheme, std::optional<std::string> focal_name)
    : src_scheme_(src_scheme), tgt_scheme_(tgt_scheme), focal_name_(std::move(focal_name)), cells_(kBuckets) {}

const std::string& FlowTensor::focal_name() const {
  if (!focal_name_) throw std::logic_error("flow tensor has no focal scope");
  return *focal_name_;
}

std::string FlowTensor::node_name(FlowNode node, bool source) const {
  if (node.is_focal()) return focal_name();
  const auto& scheme = source ? src_scheme() : tgt_scheme();
  return std::string(scheme.display_name(node.field_id()));
}

std::size_t FlowTensor::bucket(std::optional<int> year) {
  if (!year) return 0;
  if (*year < kMinYear || *year > kMaxYear) throw std::out_of_range("year outside supported range");
  return static_cast<std::size_t>(*year - kMinYear + 1);
}

std::optional<int> FlowTensor::bucket_year(std::size_t b) {
  if (b == 0) return std::nullopt;
  return static_cast<int>(b) - 1 + kMinYear;
}

std::size_t FlowTensor::row_of(FlowNode n) const {
  if (n.is_focal()) {
    if (!has_focal()) throw std::invalid_argument("flow tensor has no focal scope");
    return static_cast<std::size_t>(src_scheme().size());
  }
  if (n.field_id().value >= src_scheme().size()) throw std::out_of_range("source field outside scheme");
  return n.field_id().value;
}

std::size_t FlowTensor::col_of(FlowNode n) const {
  if (n.is_focal()) {
    if (!has_focal()) throw std::invalid_argument("flow tensor has no focal scope");
    return static_cast<std::size_t>(tgt_scheme().size());
  }
  if (n.field_id().value >= tgt_scheme().size()) throw std::out_of_range("target field outside scheme");
  return n.field_id().value;
}

template <typename F>
void FlowTensor::for_buckets(const YearFilter& years, F&& f) const {
  if (!years) {
    for (std::size_t b = 0; b < kBuckets; ++b) f(b);
    return;
  }
  int first = std::max(years->first, kMinYear), last = std::min(years->last, kMaxYear);
  for (int y = first; y <= last; ++y) f(bucket(y));
}

std::uint64_t FlowTensor::count(FlowNode src, FlowNode tgt, std::optional<int> year) const {
  const auto& c = cells_[bucket(year)];
  return c.empty() ? 0 : c[row_of(src) * cols() + col_of(tgt)];
}

std::uint64_t FlowTensor::count(FlowNode src, FlowNode tgt, const YearFilter& years) const {
  const std::size_t cell = row_of(src) * cols() + col_of(tgt);
  std::uint64_t sum = 0;
  for_buckets(years, [&](std::size_t b) {
    if (!cells_[b].empty()) sum += cells_[b][cell];
  });
  return sum;
}

std::uint64_t FlowTensor::total(const YearFilter& years) const {
  const auto ks = static_cast<std::size_t>(src_scheme().size());
  const auto kt = static_cast<std::size_t>(tgt_scheme().size());
  std::uint64_t sum = 0;
  for_buckets(years, [&](std::size_t b) {
    const auto& c = cells_[b];
    if (c.empty()) return;
    for (std::size_t r = 0; r < ks; ++r)
      for (std::size_t k = 0; k < kt; ++k) sum += c[r * cols() + k];
  });
  return sum;
}

std::uint64_t FlowTensor::row_total(FlowNode src, FieldSet targets, const YearFilter& years) const {
  std::uint64_t sum = 0;
  targets.for_each([&](FieldId f) { sum += count(src, FlowNode::field(f), years); });
  return sum;
}

std::uint64_t FlowTensor::column_total(FlowNode tgt, FieldSet sources, const YearFilter& years) const {
  std::uint64_t sum = 0;
  sources.for_each([&](FieldId f) { sum += count(FlowNode::field(f), tgt, years); });
  return sum;
}

std::uint64_t FlowTensor::focal_out_edges(const YearFilter& years) const {
  std::uint64_t sum = 0;
  for_buckets(years, [&](std::size_t b) { sum += focal_out_[b]; });
  return sum;
}

std::uint64_t FlowTensor::focal_in_edges(const YearFilter& years) const {
  std::uint64_t sum = 0;
  for_buckets(years, [&](std::size_t b) { sum += focal_in_[b]; });
  return sum;
}

std::uint64_t FlowTensor::focal_self_edges(const YearFilter& years) const {
  std::uint64_t sum = 0;
  for_buckets(years, [&](std::size_t b) { sum += focal_self_[b]; });
  return sum;
}

std::vector<int> FlowTensor::years() const {
  std::vector<int> out;
  for (std::size_t b = 1; b < kBuckets; ++b) {
    const auto& c = cells_[b];
    bool any = focal_out_[b] || focal_in_[b] || std::any_of(c.begin(), c.end(), [](auto v) { return v != 0; });
    if (any) out.push_back(*bucket_year(b));
  }
  return out;
}

void FlowTensor::add(FlowNode src, FlowNode tgt, std::optional<int> year, std::uint64_t n) {
  auto& c = cells_[bucket(year)];
  if (c.empty()) c.assign(rows() * cols(), 0);
  c[row_of(src) * cols() + col_of(tgt)] += n;
}

void FlowTensor::add_edge(FieldSet src_labels, FieldSet tgt_labels, bool src_focal, bool tgt_focal,
                          std::optional<int> year) {
  const std::size_t b = bucket(year);
  auto& c = cells_[b];
  if (c.empty()) c.assign(rows() * cols(), 0);
  const std::size_t nc = cols();
  ++scoped_edges_;
  if (src_labels.empty() || tgt_labels.empty()) ++unlabeled_edges_;

  src_labels.for_each([&](FieldId fs) {
    tgt_labels.for_each([&](FieldId ft) { ++c[fs.value * nc + ft.value]; });
  });
  if (!has_focal()) return;
  const std::size_t fr = static_cast<std::size_t>(src_scheme().size());
  const std::size_t fc = static_cast<std::size_t>(tgt_scheme().size());
  if (src_focal) {
    ++focal_out_[b];
    tgt_labels.for_each([&](FieldId ft) { ++c[fr * nc + ft.value]; });
  }
  if (tgt_focal) {
    ++focal_in_[b];
    src_labels.for_each([&](FieldId fs) { ++c[fs.value * nc + fc]; });
  }
  if (src_focal && tgt_focal) {
    ++focal_self_[b];
    ++c[fr * nc + fc];
  }
}

FlowTensor FlowTensor::transposed() const {
  FlowTensor t(tgt_scheme_, src_scheme_, focal_name_);
  t.src_scope_name = tgt_scope_name;
  t.tgt_scope_name = src_scope_name;
  const std::size_t r = rows(), k = cols();
  for (std::size_t b = 0; b < kBuckets; ++b) {
    if (cells_[b].empty()) continue;
    auto& dst = t.cells_[b];
    dst.assign(r * k, 0);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < k; ++j) dst[j * r + i] = cells_[b][i * k + j];
  }
  t.focal_out_ = focal_in_;
  t.focal_in_ = focal_out_;
  t.focal_self_ = focal_self_;
  t.unlabeled_edges_ = unlabeled_edges_;
  t.scoped_edges_ = scoped_edges_;
  return t;
}

FlowTensor& FlowTensor::operator+=(const FlowTensor& other) {
  if (src_scheme_ != other.src_scheme_ || tgt_scheme_ != other.tgt_scheme_ || has_focal() != other.has_focal()) {
    throw std::invalid_argument("cannot merge flow tensors of different shape");
  }
  for (std::size_t b = 0; b < kBuckets; ++b) {
    const auto& o = other.cells_[b];
    if (o.empty()) continue;
    auto& c = cells_[b];
    if (c.empty()) {
      c = o;
    } else {
      for (std::size_t i = 0; i < c.size(); ++i) c[i] += o[i];
    }
    focal_out_[b] += other.focal_out_[b];
    focal_in_[b] += other.focal_in_[b];
    focal_self_[b] += other.focal_self_[b];
  }
  unlabeled_edges_ += other.unlabeled_edges_;
  scoped_edges_ += other.scoped_edges_;
  return *this;
}

bool FlowTensor::operator==(const FlowTensor& other) const {
  if (src_scheme_ != other.src_scheme_ || tgt_scheme_ != other.tgt_scheme_ || has_focal() != other.has_focal())
    return false;
  if (focal_out_ != other.focal_out_ || focal_in_ != other.focal_in_ || focal_self_ != other.focal_self_) return false;
  if (unlabeled_edges_ != other.unlabeled_edges_ || scoped_edges_ != other.scoped_edges_) return false;
  auto zero = [](const std::vector<std::uint64_t>& v) {
    return std::all_of(v.begin(), v.end(), [](auto x) { return x == 0; });
  };
  for (std::size_t b = 0; b < kBuckets; ++b) {
    const auto& a = cells_[b];
    const auto& o = other.cells_[b];
    if (a.empty() || o.empty()) {
      if (!zero(a) || !zero(o)) return false;
    } else if (a != o) {
      return false;
    }
  }
  return true;
}

namespace {

FlowTensor build_range(const CorpusIndex& index, const PaperLabels& src_labels, const PaperLabels& tgt_labels,
                       const FlowSpec& spec, PaperIdx begin, PaperIdx end) {
  FlowTensor t(src_labels.scheme_kind(), tgt_labels.scheme_kind(),
               spec.focal ? std::optional<std::string>(spec.focal->name()) : std::nullopt);
  t.src_scope_name = spec.src_scope.name();
  t.tgt_scope_name = spec.tgt_scope.name();
  for (PaperIdx s = begin; s < end; ++s) {
    if (!spec.src_scope.contains(index, s)) continue;
    const FieldSet ls = src_labels.of(s);
    const bool s_focal = spec.focal && spec.focal->contains(index, s);
    const auto s_year = index.year(s);
    for (PaperIdx d : index.references(s)) {
      if (!spec.tgt_scope.contains(index, d)) continue;
      const bool d_focal = spec.focal && spec.focal->contains(index, d);
      const auto year = spec.year_axis == YearAxis::CitingPaperYear ? s_year : index.year(d);
      t.add_edge(ls, tgt_labels.of(d), s_focal, d_focal, year);
    }
  }
  return t;
}

}  // namespace

FlowTensor build_flow_tensor(const CorpusIndex& index, const PaperLabels& src_labels, const PaperLabels& tgt_labels,
                             const FlowSpec& spec) {
  if (src_labels.size() != index.paper_count() || tgt_labels.size() != index.paper_count()) {
    throw std::invalid_argument("label vectors do not match corpus size");
  }
  const auto n = static_cast<PaperIdx>(index.paper_count());
  const unsigned threads = std::max(1u, std::min<unsigned>(spec.threads, std::max<PaperIdx>(n, 1)));
  if (threads == 1) return build_range(index, src_labels, tgt_labels, spec, 0, n);

  std::vector<std::optional<FlowTensor>> parts(threads);
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) {
      auto b = static_cast<PaperIdx>(std::uint64_t{n} * i / threads);
      auto e = static_cast<PaperIdx>(std::uint64_t{n} * (i + 1) / threads);
      pool.emplace_back([&, i, b, e] { parts[i] = build_range(index, src_labels, tgt_labels, spec, b, e); });
    }
  }
  FlowTensor out = std::move(*parts[0]);
  for (unsigned i = 1; i < threads; ++i) out += *parts[i];
  return out;
}

FlowTensor build_flow_tensor(const CorpusIndex& index, SchemeKind scheme, const FlowSpec& spec) {
  auto labels = PaperLabels::from_index(index, scheme);
  return build_flow_tensor(index, labels, labels, spec);
}

std::optional<double> ShareTable::percent(FieldId f) const {
  for (const auto& r : rows)
    if (r.field == f) return r.percent;
  return std::nullopt;
}

namespace {

ShareTable make_shares(FieldSet scope, std::uint64_t denominator, const std::vector<std::uint64_t>& counts) {
  ShareTable t;
  if (denominator == 0) return t;
  t.denominator = denominator;
  std::size_t i = 0;
  scope.for_each([&](FieldId f) {
    const auto c = counts[i++];
    t.rows.push_back({f, c, 100.0 * static_cast<double>(c) / static_cast<double>(denominator)});
  });
  return t;
}

}  // namespace

ShareTable outgoing_shares(const FlowTensor& tensor, FlowNode src, FieldSet denominator_scope, const YearFilter& years) {
  if (denominator_scope.empty()) throw std::invalid_argument("empty denominator scope");
  std::vector<std::uint64_t> counts;
  std::uint64_t denom = 0;
  denominator_scope.for_each([&](FieldId f) {
    counts.push_back(tensor.count(src, FlowNode::field(f), years));
    denom += counts.back();
  });
  return make_shares(denominator_scope, denom, counts);
}

ShareTable incoming_shares(const FlowTensor& tensor, FlowNode tgt, FieldSet denominator_scope, const YearFilter& years) {
  if (denominator_scope.empty()) throw std::invalid_argument("empty denominator scope");
  std::vector<std::uint64_t> counts;
  std::uint64_t denom = 0;
  denominator_scope.for_each([&](FieldId f) {
    counts.push_back(tensor.count(FlowNode::field(f), tgt, years));
    denom += counts.back();
  });
  return make_shares(denominator_scope, denom, counts);
}

FlowSlice flow_slice(const FlowTensor& tensor, const std::vector<FlowNode>& src, const std::vector<FlowNode>& tgt,
                     const YearFilter& years) {
  FlowSlice s;
  s.years = years;
  for (auto n : src) s.src_labels.push_back(tensor.node_name(n, true));
  for (auto n : tgt) s.tgt_labels.push_back(tensor.node_name(n, false));
  s.matrix.assign(src.size(), std::vector<std::uint64_t>(tgt.size(), 0));
  s.row_totals.assign(src.size(), 0);
  s.col_totals.assign(tgt.size(), 0);
  for (std::size_t i = 0; i < src.size(); ++i) {
    for (std::size_t j = 0; j < tgt.size(); ++j) {
      const auto c = tensor.count(src[i], tgt[j], years);
      s.matrix[i][j] = c;
      s.row_totals[i] += c;
      s.col_totals[j] += c;
      s.total += c;
    }
  }
  return s;
}

std::vector<FlowNode> field_nodes(FieldSet set) {
  std::vector<FlowNode> out;
  set.for_each([&](FieldId f) { out.push_back(FlowNode::field(f)); });
  return out;
}

}  // namespace citefield
