#include "citefield/fields.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace citefield {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::vector<FieldInfo> top_level_labels() {
  // Ordered by paper count, largest first.
  return {
      {"medicine", "Medicine", {}},
      {"biology", "Biology", {}},
      {"computer-science", "Computer Science", {"cs"}},
      {"chemistry", "Chemistry", {}},
      {"engineering", "Engineering", {}},
      {"physics", "Physics", {}},
      {"materials-science", "Materials Science", {}},
      {"psychology", "Psychology", {}},
      {"environmental-science", "Environmental Science", {}},
      {"business", "Business", {}},
      {"education", "Education", {}},
      {"mathematics", "Mathematics", {"math"}},
      {"economics", "Economics", {}},
      {"political-science", "Political Science", {}},
      {"agricultural-and-food-sciences", "Agricultural And Food Sciences", {}},
      {"sociology", "Sociology", {}},
      {"history", "History", {}},
      {"art", "Art", {}},
      {"geology", "Geology", {}},
      {"geography", "Geography", {}},
      {"philosophy", "Philosophy", {}},
      {"law", "Law", {}},
      {"linguistics", "Linguistics", {}},
  };
}

std::vector<FieldInfo> cs_subfield_labels() {
  return {
      {"machine-learning", "ML", {"Machine Learning"}},
      {"artificial-intelligence", "AI'", {"AI", "Artificial Intelligence"}},
      {"computer-vision", "CV", {"Computer Vision", "computer imaging and vision"}},
      {"data-mining", "DM", {"Data Mining"}},
      {"information-retrieval", "IR", {"Information Retrieval"}},
      {"computer-networks", "Computer Networks", {}},
      {"computer-security", "Computer Security", {}},
      {"software-engineering", "Software Engineering", {}},
      {"databases", "Databases", {}},
      {"human-computer-interaction", "Human-Computer Interaction", {"HCI"}},
      {"theoretical-computer-science", "Theoretical Computer Science", {}},
      {"computer-hardware", "Computer Hardware", {}},
      {"robotics", "Robotics", {}},
      {"bioinformatics", "Bioinformatics", {}},
      {"operating-systems", "Operating Systems", {}},
      {"internet", "Internet", {}},
  };
}

std::vector<FieldInfo> nlp_subfield_labels() {
  return {
      {"computational-social-science", "Computational Social Science and Cultural Analytics", {}},
      {"dialogue", "Dialogue and Interactive Systems", {}},
      {"discourse-pragmatics", "Discourse and Pragmatics", {}},
      {"efficient-methods", "Efficient Methods for NLP", {}},
      {"ethics", "Ethics, Bias, and Fairness", {}},
      {"generation", "Generation", {}},
      {"information-extraction", "Information Extraction", {}},
      {"information-retrieval-text-mining", "Information Retrieval and Text Mining", {}},
      {"interpretability", "Interpretability and Analysis of Models for NLP", {}},
      {"language-grounding", "Language Grounding to Vision, Robotics and Beyond", {}},
      {"linguistic-theories", "Linguistic Theories, Cognitive Modeling and Psycholinguistics", {}},
      {"ml-for-nlp", "Machine Learning for NLP", {}},
      {"machine-translation", "Machine Translation", {}},
      {"multilinguality", "Multilinguality and Language Diversity", {}},
      {"nlp-applications", "NLP Applications", {}},
      {"phonology-morphology", "Phonology, Morphology and Word Segmentation", {}},
      {"question-answering", "Question Answering", {}},
      {"resources-evaluation", "Resources and Evaluation", {}},
      {"lexical-semantics", "Semantics: Lexical", {}},
      {"sentence-semantics", "Semantics: Sentence-level Semantics, Textual Inference and Other areas", {}},
      {"sentiment-analysis", "Sentiment Analysis, Stylistic Analysis, and Argument Mining", {}},
      {"speech", "Speech Recognition, Text-to-Speech and Spoken Language Understanding", {}},
      {"summarization", "Summarization", {}},
      {"syntax", "Syntax: Tagging, Chunking and Parsing", {}},
      {"shared-tasks", "Shared Tasks", {}},
  };
}

}  // namespace

std::string_view to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::TopLevel: return "top-level";
    case SchemeKind::CsSubfield: return "cs-subfields";
    case SchemeKind::NlpSubfield: return "nlp-subfields";
  }
  return "unknown";
}

std::vector<FieldId> FieldSet::ids() const {
  std::vector<FieldId> out;
  out.reserve(static_cast<std::size_t>(size()));
  for_each([&](FieldId id) { out.push_back(id); });
  return out;
}

FieldScheme::FieldScheme(SchemeKind kind, std::vector<FieldInfo> labels)
    : kind_(kind), labels_(std::move(labels)) {
  if (labels_.size() > 64) throw std::logic_error("scheme larger than 64 labels");
}

const FieldScheme& FieldScheme::top_level() {
  static const FieldScheme scheme(SchemeKind::TopLevel, top_level_labels());
  return scheme;
}

const FieldScheme& FieldScheme::cs_subfields() {
  static const FieldScheme scheme(SchemeKind::CsSubfield, cs_subfield_labels());
  return scheme;
}

const FieldScheme& FieldScheme::nlp_subfields() {
  static const FieldScheme scheme(SchemeKind::NlpSubfield, nlp_subfield_labels());
  return scheme;
}

const FieldScheme& FieldScheme::get(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::TopLevel: return top_level();
    case SchemeKind::CsSubfield: return cs_subfields();
    case SchemeKind::NlpSubfield: return nlp_subfields();
  }
  throw std::invalid_argument("unknown scheme kind");
}

std::optional<FieldId> FieldScheme::find(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const auto& l = labels_[i];
    bool hit = iequals(label, l.token) || iequals(label, l.name) ||
               std::any_of(l.aliases.begin(), l.aliases.end(),
                           [&](std::string_view a) { return iequals(label, a); });
    if (hit) return FieldId{static_cast<std::uint8_t>(i)};
  }
  return std::nullopt;
}

FieldSet FieldScheme::all() const {
  return FieldSet{labels_.size() == 64 ? ~std::uint64_t{0}
                                       : (std::uint64_t{1} << labels_.size()) - 1};
}

namespace fields {

FieldId computer_science() {
  static const FieldId id = *FieldScheme::top_level().find("computer-science");
  return id;
}

FieldId linguistics() {
  static const FieldId id = *FieldScheme::top_level().find("linguistics");
  return id;
}

FieldSet cs_only() {
  FieldSet s;
  s.insert(computer_science());
  return s;
}

FieldSet non_cs() {
  FieldSet s = FieldScheme::top_level().all();
  s.erase(computer_science());
  return s;
}

}  // namespace fields

}  // namespace citefield
