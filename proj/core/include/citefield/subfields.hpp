#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "citefield/corpus.hpp"
#include "citefield/flowgraph.hpp"
#include "citefield/scope.hpp"

namespace citefield {

/// Lowercases ASCII letters and splits on every ASCII non-alphanumeric
/// character. Non-ASCII bytes stay inside tokens.
std::vector<std::string> normalize_title(std::string_view title);

class Stopwords {
 public:
  Stopwords() = default;
  explicit Stopwords(std::unordered_set<std::string> words) : words_(std::move(words)) {}

  /// One token per line; blank lines and `#` comments ignored.
  static Stopwords parse(std::istream& in);
  static Stopwords load(const std::filesystem::path& path);

  bool contains(std::string_view token) const { return words_.count(std::string(token)) > 0; }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

struct BigramCount {
  std::string bigram;  // "first second"
  std::uint64_t frequency = 0;

  bool operator==(const BigramCount&) const = default;
};

/// Counts contiguous token pairs over a stream of titles.
class BigramCounter {
 public:
  explicit BigramCounter(const Stopwords* stopwords = nullptr) : stopwords_(stopwords) {}

  void add(std::string_view title);
  /// Exact top-k by frequency, ties broken by ascending bigram text.
  std::vector<BigramCount> top(std::size_t k) const;
  std::size_t distinct() const { return counts_.size(); }

 private:
  const Stopwords* stopwords_;
  std::unordered_map<std::string, std::uint64_t> counts_;
};

std::vector<BigramCount> top_bigrams(const std::vector<std::string>& titles, std::size_t k = 200,
                                     const Stopwords* stopwords = nullptr);

struct LexiconEntry {
  std::string bigram;
  FieldId category;  // NLP-subfield scheme
  std::string note;
};

/// Hand-assigned bigram -> NLP subfield mapping.
class SubfieldLexicon {
 public:
  static constexpr std::size_t kMaxEntries = 200;

  /// `bigram<TAB>category[<TAB>note]` per line, `#` comments.
  static SubfieldLexicon parse(std::istream& in, std::string_view source = "<stream>");
  static SubfieldLexicon load(const std::filesystem::path& path);

  void add(std::string_view bigram, FieldId category, std::string note = {});
  const std::vector<LexiconEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// Every category whose bigram occurs in the normalized title.
  FieldSet classify(std::string_view title) const;

 private:
  std::vector<LexiconEntry> entries_;
  std::unordered_map<std::string, FieldSet> by_bigram_;
};

inline FieldSet classify_subfield(std::string_view title, const SubfieldLexicon& lexicon) {
  return lexicon.classify(title);
}

/// NLP-subfield labels for papers in `scope` (others get the empty set).
PaperLabels classify_corpus(const CorpusIndex& index, const SubfieldLexicon& lexicon,
                            const PaperScope& scope = PaperScope::nlp());

enum class SubfieldTarget { CsSubfields, NonCsFields };

struct SubfieldMatrix {
  SchemeKind column_scheme = SchemeKind::CsSubfield;
  std::vector<FieldId> rows;     // NLP subfields with a nonzero denominator
  std::vector<FieldId> columns;  // every field of the target scope
  std::vector<std::vector<double>> percent;
  std::vector<std::uint64_t> denominators;
  std::vector<FieldId> omitted;  // subfields with a zero denominator

  std::vector<std::string> row_labels() const;
  std::vector<std::string> column_labels() const;
};

/// Percent of each subfield's citations going to CS subfields (denominator:
/// its citations to CS subfields) or to non-CS fields (denominator: its
/// citations to non-CS fields).
SubfieldMatrix subfield_flow_matrix(const CorpusIndex& index, const PaperLabels& subfield_labels,
                                    SubfieldTarget target, const YearFilter& years = std::nullopt);

/// Outgoing CFDI of each subfield minus the NLP-wide outgoing CFDI over the
/// same years. Subfields without outgoing citations are omitted.
std::map<FieldId, double> subfield_cfdi_delta(const CorpusIndex& index, const PaperLabels& subfield_labels,
                                              const YearFilter& years);

/// Edges from papers of `subfield` landing in papers of the same subfield,
/// over all edges from that subfield.
double subfield_intra_pct(const CorpusIndex& index, const PaperLabels& subfield_labels, FieldId subfield,
                          const YearFilter& years = std::nullopt);

}  // namespace citefield
