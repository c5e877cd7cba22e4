#include "citefield/subfields.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <stdexcept>

#include "citefield/errors.hpp"
#include "citefield/metrics.hpp"

namespace citefield {

namespace {

bool is_ascii_alnum(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'); }

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> normalize_title(std::string_view title) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : title) {
    if (c >= 0x80 || is_ascii_alnum(c)) {
      cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

Stopwords Stopwords::parse(std::istream& in) {
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    for (auto& tok : normalize_title(t)) words.insert(std::move(tok));
  }
  return Stopwords(std::move(words));
}

Stopwords Stopwords::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open stopword list " + path.string());
  return parse(in);
}

void BigramCounter::add(std::string_view title) {
  const auto tokens = normalize_title(title);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (stopwords_ && stopwords_->contains(tokens[i]) && stopwords_->contains(tokens[i + 1])) continue;
    ++counts_[tokens[i] + ' ' + tokens[i + 1]];
  }
}

std::vector<BigramCount> BigramCounter::top(std::size_t k) const {
  std::vector<BigramCount> all;
  all.reserve(counts_.size());
  for (const auto& [b, n] : counts_) all.push_back({b, n});
  auto better = [](const BigramCount& a, const BigramCount& b) {
    return a.frequency != b.frequency ? a.frequency > b.frequency : a.bigram < b.bigram;
  };
  k = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), better);
  all.resize(k);
  return all;
}

std::vector<BigramCount> top_bigrams(const std::vector<std::string>& titles, std::size_t k, const Stopwords* stopwords) {
  BigramCounter counter(stopwords);
  for (const auto& t : titles) counter.add(t);
  return counter.top(k);
}

SubfieldLexicon SubfieldLexicon::parse(std::istream& in, std::string_view source) {
  SubfieldLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  const auto& scheme = FieldScheme::nlp_subfields();
  while (std::getline(in, line)) {
    ++line_no;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto tab = t.find('\t');
    if (tab == std::string_view::npos) throw ParseError("lexicon entry needs bigram<TAB>category", line_no);
    auto bigram = trim(t.substr(0, tab));
    auto rest = t.substr(tab + 1);
    auto tab2 = rest.find('\t');
    auto category = trim(rest.substr(0, tab2));
    std::string note = tab2 == std::string_view::npos ? std::string(source) + ":" + std::to_string(line_no)
                                                      : std::string(trim(rest.substr(tab2 + 1)));
    auto id = scheme.find(category);
    if (!id) throw ParseError("unknown NLP subfield category \"" + std::string(category) + "\"", line_no);
    try {
      lex.add(bigram, *id, std::move(note));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return lex;
}

SubfieldLexicon SubfieldLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lexicon " + path.string());
  return parse(in, path.filename().string());
}

void SubfieldLexicon::add(std::string_view bigram, FieldId category, std::string note) {
  if (category.value >= FieldScheme::nlp_subfields().size()) throw std::invalid_argument("category outside NLP subfields");
  auto tokens = normalize_title(bigram);
  if (tokens.size() != 2) throw std::invalid_argument("lexicon key \"" + std::string(bigram) + "\" is not a bigram");
  std::string key = tokens[0] + ' ' + tokens[1];
  if (by_bigram_.count(key)) throw std::invalid_argument("duplicate lexicon bigram \"" + key + "\"");
  if (entries_.size() >= kMaxEntries) {
    throw std::invalid_argument("lexicon exceeds " + std::to_string(kMaxEntries) + " entries");
  }
  FieldSet s;
  s.insert(category);
  by_bigram_.emplace(key, s);
  entries_.push_back({std::move(key), category, std::move(note)});
}

FieldSet SubfieldLexicon::classify(std::string_view title) const {
  FieldSet out;
  const auto tokens = normalize_title(title);
  std::string key;
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    key.assign(tokens[i]).append(1, ' ').append(tokens[i + 1]);
    if (auto it = by_bigram_.find(key); it != by_bigram_.end()) out = out | it->second;
  }
  return out;
}

PaperLabels classify_corpus(const CorpusIndex& index, const SubfieldLexicon& lexicon, const PaperScope& scope) {
  std::vector<FieldSet> sets(index.paper_count());
  for (PaperIdx p = 0; p < sets.size(); ++p) {
    if (scope.contains(index, p)) sets[p] = lexicon.classify(index.title(p));
  }
  return {SchemeKind::NlpSubfield, std::move(sets)};
}

std::vector<std::string> SubfieldMatrix::row_labels() const {
  std::vector<std::string> out;
  for (auto f : rows) out.emplace_back(FieldScheme::nlp_subfields().display_name(f));
  return out;
}

std::vector<std::string> SubfieldMatrix::column_labels() const {
  std::vector<std::string> out;
  for (auto f : columns) out.emplace_back(FieldScheme::get(column_scheme).display_name(f));
  return out;
}

SubfieldMatrix subfield_flow_matrix(const CorpusIndex& index, const PaperLabels& subfield_labels, SubfieldTarget target,
                                    const YearFilter& years) {
  if (subfield_labels.scheme_kind() != SchemeKind::NlpSubfield) throw std::invalid_argument("expected NLP subfield labels");
  SubfieldMatrix m;
  m.column_scheme = target == SubfieldTarget::CsSubfields ? SchemeKind::CsSubfield : SchemeKind::TopLevel;
  const FieldSet scope = target == SubfieldTarget::CsSubfields ? FieldScheme::cs_subfields().all() : fields::non_cs();
  m.columns = scope.ids();

  const auto tgt_labels = PaperLabels::from_index(index, m.column_scheme);
  const auto tensor = build_flow_tensor(index, subfield_labels, tgt_labels);
  FieldScheme::nlp_subfields().all().for_each([&](FieldId s) {
    auto shares = outgoing_shares(tensor, FlowNode::field(s), scope, years);
    if (shares.empty()) {
      m.omitted.push_back(s);
      return;
    }
    m.rows.push_back(s);
    m.denominators.push_back(shares.denominator);
    std::vector<double> row;
    for (const auto& r : shares.rows) row.push_back(r.percent);
    m.percent.push_back(std::move(row));
  });
  return m;
}

std::map<FieldId, double> subfield_cfdi_delta(const CorpusIndex& index, const PaperLabels& subfield_labels,
                                              const YearFilter& years) {
  if (subfield_labels.scheme_kind() != SchemeKind::NlpSubfield) throw std::invalid_argument("expected NLP subfield labels");
  FlowSpec spec;
  spec.focal = PaperScope::nlp();
  const auto tensor = build_flow_tensor(index, subfield_labels, PaperLabels::top_level(index), spec);
  const auto nlp_counts = outgoing_counts(tensor, FlowNode::focal(), years);
  if (nlp_counts.total() == 0) throw UndefinedMetricError("NLP has no outgoing citations in the requested years");
  const double baseline = cfdi(nlp_counts);

  std::map<FieldId, double> out;
  FieldScheme::nlp_subfields().all().for_each([&](FieldId s) {
    const auto counts = outgoing_counts(tensor, FlowNode::field(s), years);
    if (counts.total() == 0) return;
    out[s] = cfdi(counts) - baseline;
  });
  return out;
}

double subfield_intra_pct(const CorpusIndex& index, const PaperLabels& subfield_labels, FieldId subfield,
                          const YearFilter& years) {
  return intra_scope_pct(index, labelled_scope(subfield_labels, subfield), years);
}

}  // namespace citefield
