#include "citefield/scope.hpp"

#include <stdexcept>

namespace citefield {

PaperScope PaperScope::all() { return {Kind::All, "all"}; }
PaperScope PaperScope::nlp() { return {Kind::Nlp, "nlp"}; }
PaperScope PaperScope::non_nlp() { return {Kind::NonNlp, "non-nlp"}; }

PaperScope PaperScope::top_level_field(FieldId field) {
  PaperScope s(Kind::Field, std::string(FieldScheme::top_level().token(field)));
  s.field_ = field;
  return s;
}

PaperScope PaperScope::custom(std::string name, Predicate pred) {
  if (!pred) throw std::invalid_argument("PaperScope::custom: empty predicate");
  PaperScope s(Kind::Custom, std::move(name));
  s.pred_ = std::make_shared<const Predicate>(std::move(pred));
  return s;
}

PaperLabels::PaperLabels(SchemeKind scheme, std::vector<FieldSet> sets)
    : scheme_(scheme), sets_(std::move(sets)) {}

PaperLabels PaperLabels::top_level(const CorpusIndex& index) {
  std::vector<FieldSet> sets(index.paper_count());
  for (PaperIdx p = 0; p < sets.size(); ++p) sets[p] = index.fields(p);
  return {SchemeKind::TopLevel, std::move(sets)};
}

PaperLabels PaperLabels::cs_subfields(const CorpusIndex& index) {
  std::vector<FieldSet> sets(index.paper_count());
  for (PaperIdx p = 0; p < sets.size(); ++p) sets[p] = index.cs_subfields(p);
  return {SchemeKind::CsSubfield, std::move(sets)};
}

PaperLabels PaperLabels::from_index(const CorpusIndex& index, SchemeKind scheme) {
  switch (scheme) {
    case SchemeKind::TopLevel: return top_level(index);
    case SchemeKind::CsSubfield: return cs_subfields(index);
    case SchemeKind::NlpSubfield: break;
  }
  throw std::invalid_argument("NLP subfield labels are derived from titles, not stored in the index");
}

PaperScope labelled_scope(const PaperLabels& labels, FieldId label) {
  const auto& scheme = labels.scheme();
  // Copy the label sets so the scope stays valid independently of `labels`.
  auto sets = std::make_shared<PaperLabels>(labels);
  return PaperScope::custom(std::string(scheme.token(label)),
                            [sets, label](const CorpusIndex&, PaperIdx p) { return sets->of(p).contains(label); });
}

}  // namespace citefield
