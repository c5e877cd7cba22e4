#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "citefield/fields.hpp"

namespace citefield {

/// Dense paper index assigned by interning, in first-seen order.
using PaperIdx = std::uint32_t;

inline constexpr int kMinYear = 1965;
inline constexpr int kMaxYear = 2099;

struct PaperRecord {
  std::string id;
  std::optional<int> year;
  std::string title;
  FieldSet fields;        // top-level scheme, never empty once parsed
  FieldSet cs_subfields;  // cs-subfield scheme
  bool is_nlp = false;
  std::uint64_t citation_count = 0;
};

struct CitationEdge {
  std::string src;  // citing
  std::string tgt;  // cited
};

/// Decodes one newline-delimited JSON paper record.
/// Throws ParseError naming the offending token or key.
PaperRecord parse_paper_record(std::string_view line, std::size_t line_no = 0);

/// Decodes one newline-delimited JSON edge record; self-citations are rejected.
CitationEdge parse_citation_edge(std::string_view line, std::size_t line_no = 0);

struct IngestOptions {
  unsigned threads = 1;
  /// Throw on the first malformed line instead of counting and skipping it.
  bool strict = false;
  std::size_t batch_lines = 1u << 16;
  std::size_t max_reported_errors = 20;
};

struct IngestSummary {
  std::uint64_t paper_lines = 0;
  std::uint64_t papers = 0;
  std::uint64_t duplicate_papers = 0;
  std::uint64_t rejected_papers = 0;
  std::uint64_t edge_lines = 0;
  std::uint64_t accepted_edges = 0;  // parsed successfully
  std::uint64_t resolvable_edges = 0;
  std::uint64_t dangling_edges = 0;
  std::uint64_t rejected_edges = 0;
  std::vector<std::string> errors;  // first few parse errors, with line numbers
};

/// Immutable in-memory corpus: interned ids, packed per-paper columns and
/// citation adjacency in both directions (CSR, neighbour lists sorted).
class CorpusIndex {
 public:
  CorpusIndex() = default;
  CorpusIndex(const CorpusIndex&) = delete;
  CorpusIndex& operator=(const CorpusIndex&) = delete;
  CorpusIndex(CorpusIndex&&) noexcept = default;
  CorpusIndex& operator=(CorpusIndex&&) noexcept = default;

  std::size_t paper_count() const { return ids_.size(); }
  std::size_t edge_count() const { return out_targets_.size(); }
  std::uint64_t dangling_edges() const { return dangling_edges_; }
  std::uint64_t duplicate_papers() const { return duplicate_papers_; }

  std::optional<PaperIdx> find(std::string_view id) const;
  std::string_view paper_id(PaperIdx p) const { return ids_[p]; }
  std::optional<int> year(PaperIdx p) const {
    return years_[p] == 0 ? std::nullopt : std::optional<int>(years_[p]);
  }
  std::string_view title(PaperIdx p) const { return titles_[p]; }
  FieldSet fields(PaperIdx p) const { return FieldSet{fields_[p]}; }
  FieldSet cs_subfields(PaperIdx p) const { return FieldSet{cs_subfields_[p]}; }
  bool is_nlp(PaperIdx p) const { return flags_[p] & kNlpFlag; }
  std::uint64_t citation_count(PaperIdx p) const { return citation_counts_[p]; }
  PaperRecord record(PaperIdx p) const;

  /// Papers cited by `p`.
  std::span<const PaperIdx> references(PaperIdx p) const {
    return {out_targets_.data() + out_offsets_[p], out_targets_.data() + out_offsets_[p + 1]};
  }
  /// Papers citing `p`.
  std::span<const PaperIdx> cited_by(PaperIdx p) const {
    return {in_sources_.data() + in_offsets_[p], in_sources_.data() + in_offsets_[p + 1]};
  }

  /// Approximate heap footprint of the index.
  std::size_t memory_bytes() const;

 private:
  friend class CorpusBuilder;
  friend void save_index(const CorpusIndex&, const std::filesystem::path&);
  friend CorpusIndex load_index(const std::filesystem::path&);

  static constexpr std::uint8_t kNlpFlag = 1;

  void add_paper(PaperRecord&& r);
  void rebuild_lookup();

  // deque keeps element addresses stable, so lookup_ can hold views into it
  std::deque<std::string> ids_;
  std::unordered_map<std::string_view, PaperIdx> lookup_;
  std::vector<std::string> titles_;
  std::vector<std::int16_t> years_;
  std::vector<std::uint32_t> fields_;
  std::vector<std::uint32_t> cs_subfields_;
  std::vector<std::uint8_t> flags_;
  std::vector<std::uint64_t> citation_counts_;
  std::vector<std::uint64_t> out_offsets_{0};
  std::vector<PaperIdx> out_targets_;
  std::vector<std::uint64_t> in_offsets_{0};
  std::vector<PaperIdx> in_sources_;
  std::uint64_t dangling_edges_ = 0;
  std::uint64_t duplicate_papers_ = 0;
};

/// Incremental construction. Papers must all be added before the first edge.
class CorpusBuilder {
 public:
  CorpusBuilder();

  /// Returns false (and counts a duplicate) when the id is already present.
  bool add_paper(PaperRecord record);
  /// Returns false when either endpoint is unknown (counted as dangling).
  bool add_edge(std::string_view src, std::string_view tgt);
  bool add_edge(const CitationEdge& e) { return add_edge(e.src, e.tgt); }
  void add_resolved_edge(PaperIdx src, PaperIdx tgt);
  void add_dangling(std::uint64_t n) { index_.dangling_edges_ += n; }

  const CorpusIndex& papers() const { return index_; }
  CorpusIndex finish() &&;

 private:
  void start_edges();

  static constexpr std::size_t kBlockEdges = std::size_t{1} << 20;

  CorpusIndex index_;
  std::vector<std::uint64_t> out_degree_;
  std::vector<std::uint64_t> in_degree_;
  std::vector<std::vector<std::pair<PaperIdx, PaperIdx>>> blocks_;
  bool edges_started_ = false;
};

struct BuildResult {
  CorpusIndex index;
  IngestSummary summary;
};

/// Single streaming pass over each input. Working memory beyond the index is
/// one batch of lines plus four bytes per edge during the final CSR pass.
BuildResult build_index(std::istream& papers, std::istream& edges, const IngestOptions& options = {});
BuildResult build_index(const std::filesystem::path& papers, const std::filesystem::path& edges,
                        const IngestOptions& options = {});

inline constexpr std::uint32_t kIndexFormatVersion = 1;

void save_index(const CorpusIndex& index, const std::filesystem::path& path);
CorpusIndex load_index(const std::filesystem::path& path);

}  // namespace citefield
