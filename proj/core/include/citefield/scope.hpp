#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "citefield/corpus.hpp"
#include "citefield/fields.hpp"

namespace citefield {

/// Closed range of publication years.
struct YearRange {
  int first = kMinYear;
  int last = kMaxYear;

  bool contains(int year) const { return year >= first && year <= last; }
  bool operator==(const YearRange&) const = default;
};

/// No range means every paper, including those with unknown year. A range
/// never admits unknown-year papers.
using YearFilter = std::optional<YearRange>;

inline bool admits(const YearFilter& filter, std::optional<int> year) {
  return !filter || (year && filter->contains(*year));
}

/// Predicate selecting papers of a corpus, with a name for export descriptors.
class PaperScope {
 public:
  using Predicate = std::function<bool(const CorpusIndex&, PaperIdx)>;

  static PaperScope all();
  /// ACL-Anthology membership, independent of field labels.
  static PaperScope nlp();
  static PaperScope non_nlp();
  static PaperScope top_level_field(FieldId field);
  static PaperScope custom(std::string name, Predicate pred);

  bool contains(const CorpusIndex& index, PaperIdx p) const {
    switch (kind_) {
      case Kind::All: return true;
      case Kind::Nlp: return index.is_nlp(p);
      case Kind::NonNlp: return !index.is_nlp(p);
      case Kind::Field: return index.fields(p).contains(field_);
      case Kind::Custom: return (*pred_)(index, p);
    }
    return false;
  }
  const std::string& name() const { return name_; }
  bool is_all() const { return kind_ == Kind::All; }

 private:
  enum class Kind { All, Nlp, NonNlp, Field, Custom };
  PaperScope(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

  Kind kind_;
  std::string name_;
  FieldId field_{};
  std::shared_ptr<const Predicate> pred_;
};

/// Per-paper label sets under one scheme.
class PaperLabels {
 public:
  PaperLabels(SchemeKind scheme, std::vector<FieldSet> sets);

  static PaperLabels top_level(const CorpusIndex& index);
  static PaperLabels cs_subfields(const CorpusIndex& index);
  static PaperLabels from_index(const CorpusIndex& index, SchemeKind scheme);

  const FieldScheme& scheme() const { return FieldScheme::get(scheme_); }
  SchemeKind scheme_kind() const { return scheme_; }
  FieldSet of(PaperIdx p) const { return sets_[p]; }
  std::size_t size() const { return sets_.size(); }

 private:
  SchemeKind scheme_;
  std::vector<FieldSet> sets_;
};

/// Papers carrying `label` under `labels`.
PaperScope labelled_scope(const PaperLabels& labels, FieldId label);

}  // namespace citefield
