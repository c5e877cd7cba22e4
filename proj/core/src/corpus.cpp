#include "citefield/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <limits>
#include <stdexcept>
#include <thread>

#include "citefield/errors.hpp"
#include <nlohmann/json.hpp>

namespace citefield {

using nlohmann::json;

namespace {

json parse_object(std::string_view line, std::size_t line_no) {
  json j = json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ParseError("malformed record: invalid JSON", line_no);
  if (!j.is_object()) throw ParseError("malformed record: expected a JSON object", line_no);
  return j;
}

std::string required_string(const json& j, const char* key, const char* missing_msg,
                            std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) throw ParseError(missing_msg, line_no);
  if (!it->is_string()) throw ParseError(std::string("malformed record: \"") + key + "\" must be a string", line_no);
  auto s = it->get<std::string>();
  if (s.empty()) throw ParseError(missing_msg, line_no);
  return s;
}

FieldSet parse_labels(const json& j, const char* key, const FieldScheme& scheme, std::size_t line_no) {
  FieldSet out;
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return out;
  if (!it->is_array()) throw ParseError(std::string("malformed record: \"") + key + "\" must be an array", line_no);
  for (const auto& v : *it) {
    if (!v.is_string()) throw ParseError(std::string("malformed record: \"") + key + "\" entries must be strings", line_no);
    const auto& name = v.get_ref<const std::string&>();
    auto id = scheme.find(name);
    if (!id) throw ParseError("unknown field label \"" + name + "\" in \"" + key + "\"", line_no);
    out.insert(*id);
  }
  return out;
}

void trim_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

void note_error(IngestSummary& s, const IngestOptions& opt, const ParseError& e) {
  if (opt.strict) throw e;
  if (s.errors.size() < opt.max_reported_errors) s.errors.emplace_back(e.what());
}

/// Runs f(begin, end, shard) over [0, n) split into `threads` contiguous shards.
template <typename F>
void for_shards(std::size_t n, unsigned threads, F&& f) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    f(std::size_t{0}, n, 0u);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    std::size_t b = n * t / threads, e = n * (t + 1) / threads;
    pool.emplace_back([&f, b, e, t] { f(b, e, t); });
  }
}

/// Reads up to `max` non-blank lines; returns their 1-based line numbers alongside.
std::size_t read_batch(std::istream& in, std::size_t max, std::vector<std::string>& lines,
                       std::vector<std::size_t>& numbers, std::size_t& line_no) {
  lines.clear();
  numbers.clear();
  std::string line;
  while (lines.size() < max && std::getline(in, line)) {
    ++line_no;
    trim_cr(line);
    if (blank(line)) continue;
    lines.push_back(std::move(line));
    numbers.push_back(line_no);
  }
  if (in.bad()) throw Error("I/O failure while reading input");
  return lines.size();
}

}  // namespace

PaperRecord parse_paper_record(std::string_view line, std::size_t line_no) {
  json j = parse_object(line, line_no);
  PaperRecord r;
  r.id = required_string(j, "id", "missing paper id", line_no);

  if (auto it = j.find("year"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw ParseError("malformed record: \"year\" must be an integer", line_no);
    auto y = it->get<std::int64_t>();
    if (y < kMinYear || y > kMaxYear) {
      throw ParseError("year " + std::to_string(y) + " outside " + std::to_string(kMinYear) + "-" +
                           std::to_string(kMaxYear),
                       line_no);
    }
    r.year = static_cast<int>(y);
  }
  if (auto it = j.find("title"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ParseError("malformed record: \"title\" must be a string", line_no);
    r.title = it->get<std::string>();
  }
  if (j.find("fields") == j.end() || j["fields"].is_null()) throw ParseError("missing field set", line_no);
  r.fields = parse_labels(j, "fields", FieldScheme::top_level(), line_no);
  if (r.fields.empty()) throw ParseError("empty field set", line_no);
  r.cs_subfields = parse_labels(j, "cs_subfields", FieldScheme::cs_subfields(), line_no);

  if (auto it = j.find("is_nlp"); it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) throw ParseError("malformed record: \"is_nlp\" must be a boolean", line_no);
    r.is_nlp = it->get<bool>();
  }
  if (auto it = j.find("citation_count"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw ParseError("malformed record: \"citation_count\" must be an integer", line_no);
    if (it->is_number_unsigned()) {
      r.citation_count = it->get<std::uint64_t>();
    } else {
      auto c = it->get<std::int64_t>();
      if (c < 0) throw ParseError("negative citation_count " + std::to_string(c), line_no);
      r.citation_count = static_cast<std::uint64_t>(c);
    }
  }
  return r;
}

CitationEdge parse_citation_edge(std::string_view line, std::size_t line_no) {
  json j = parse_object(line, line_no);
  CitationEdge e;
  e.src = required_string(j, "src", "missing source", line_no);
  e.tgt = required_string(j, "tgt", "missing target", line_no);
  if (e.src == e.tgt) throw ParseError("self-citation edge \"" + e.src + "\"", line_no);
  return e;
}

// --- CorpusIndex ---

std::optional<PaperIdx> CorpusIndex::find(std::string_view id) const {
  auto it = lookup_.find(id);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

PaperRecord CorpusIndex::record(PaperIdx p) const {
  PaperRecord r;
  r.id = ids_[p];
  r.year = year(p);
  r.title = titles_[p];
  r.fields = fields(p);
  r.cs_subfields = cs_subfields(p);
  r.is_nlp = is_nlp(p);
  r.citation_count = citation_counts_[p];
  return r;
}

void CorpusIndex::add_paper(PaperRecord&& r) {
  auto idx = static_cast<PaperIdx>(ids_.size());
  ids_.push_back(std::move(r.id));
  lookup_.emplace(std::string_view(ids_.back()), idx);
  titles_.push_back(std::move(r.title));
  years_.push_back(r.year ? static_cast<std::int16_t>(*r.year) : std::int16_t{0});
  fields_.push_back(static_cast<std::uint32_t>(r.fields.bits()));
  cs_subfields_.push_back(static_cast<std::uint32_t>(r.cs_subfields.bits()));
  flags_.push_back(r.is_nlp ? kNlpFlag : std::uint8_t{0});
  citation_counts_.push_back(r.citation_count);
}

void CorpusIndex::rebuild_lookup() {
  lookup_.clear();
  lookup_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    lookup_.emplace(std::string_view(ids_[i]), static_cast<PaperIdx>(i));
  }
}

std::size_t CorpusIndex::memory_bytes() const {
  std::size_t b = 0;
  for (const auto& s : ids_) b += sizeof(std::string) + (s.size() > 15 ? s.capacity() : 0);
  for (const auto& s : titles_) b += sizeof(std::string) + (s.size() > 15 ? s.capacity() : 0);
  // bucket array plus one node (key view, value, hash, next) per entry
  b += lookup_.bucket_count() * sizeof(void*) + lookup_.size() * 48;
  b += years_.capacity() * sizeof(std::int16_t);
  b += (fields_.capacity() + cs_subfields_.capacity()) * sizeof(std::uint32_t);
  b += flags_.capacity();
  b += citation_counts_.capacity() * sizeof(std::uint64_t);
  b += (out_offsets_.capacity() + in_offsets_.capacity()) * sizeof(std::uint64_t);
  b += (out_targets_.capacity() + in_sources_.capacity()) * sizeof(PaperIdx);
  return b;
}

// --- CorpusBuilder ---

CorpusBuilder::CorpusBuilder() = default;

bool CorpusBuilder::add_paper(PaperRecord record) {
  if (edges_started_) throw std::logic_error("CorpusBuilder: papers must precede edges");
  if (record.fields.empty()) throw std::invalid_argument("paper \"" + record.id + "\" has an empty field set");
  if (index_.lookup_.count(record.id)) {
    ++index_.duplicate_papers_;
    return false;
  }
  if (index_.ids_.size() >= std::numeric_limits<PaperIdx>::max()) throw Error("paper count exceeds index capacity");
  index_.add_paper(std::move(record));
  return true;
}

bool CorpusBuilder::add_edge(std::string_view src, std::string_view tgt) {
  start_edges();
  auto s = index_.find(src);
  auto t = index_.find(tgt);
  if (!s || !t) {
    ++index_.dangling_edges_;
    return false;
  }
  add_resolved_edge(*s, *t);
  return true;
}

void CorpusBuilder::start_edges() {
  if (edges_started_) return;
  edges_started_ = true;
  out_degree_.assign(index_.paper_count(), 0);
  in_degree_.assign(index_.paper_count(), 0);
}

void CorpusBuilder::add_resolved_edge(PaperIdx src, PaperIdx tgt) {
  start_edges();
  if (src == tgt) throw std::invalid_argument("self-citation edge");
  if (blocks_.empty() || blocks_.back().size() == kBlockEdges) {
    blocks_.emplace_back();
    blocks_.back().reserve(kBlockEdges);
  }
  blocks_.back().emplace_back(src, tgt);
  ++out_degree_[src];
  ++in_degree_[tgt];
}

CorpusIndex CorpusBuilder::finish() && {
  start_edges();
  CorpusIndex idx = std::move(index_);
  const std::size_t n = idx.paper_count();

  auto prefix = [n](const std::vector<std::uint64_t>& deg) {
    std::vector<std::uint64_t> off(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) off[i + 1] = off[i] + deg[i];
    return off;
  };
  idx.in_offsets_ = prefix(in_degree_);
  idx.out_offsets_ = prefix(out_degree_);
  const std::uint64_t m = idx.in_offsets_[n];

  // Scatter COO blocks into the incoming lists, releasing each block as it is consumed.
  idx.in_sources_.assign(m, 0);
  {
    std::vector<std::uint64_t> cursor(idx.in_offsets_.begin(), idx.in_offsets_.end() - 1);
    for (auto& block : blocks_) {
      for (auto [s, t] : block) idx.in_sources_[cursor[t]++] = s;
      std::vector<std::pair<PaperIdx, PaperIdx>>().swap(block);
    }
    blocks_.clear();
  }
  // Walking targets in ascending order leaves every outgoing list sorted.
  idx.out_targets_.assign(m, 0);
  {
    std::vector<std::uint64_t> cursor(idx.out_offsets_.begin(), idx.out_offsets_.end() - 1);
    for (std::size_t t = 0; t < n; ++t) {
      for (auto k = idx.in_offsets_[t]; k < idx.in_offsets_[t + 1]; ++k) {
        idx.out_targets_[cursor[idx.in_sources_[k]]++] = static_cast<PaperIdx>(t);
      }
    }
  }
  for (std::size_t t = 0; t < n; ++t) {
    std::sort(idx.in_sources_.begin() + static_cast<std::ptrdiff_t>(idx.in_offsets_[t]),
              idx.in_sources_.begin() + static_cast<std::ptrdiff_t>(idx.in_offsets_[t + 1]));
  }
  out_degree_.clear();
  in_degree_.clear();
  return idx;
}

// --- streaming ingestion ---

BuildResult build_index(std::istream& papers, std::istream& edges, const IngestOptions& options) {
  const unsigned threads = std::max(1u, options.threads);
  IngestSummary summary;
  CorpusBuilder builder;

  std::vector<std::string> lines;
  std::vector<std::size_t> numbers;
  std::size_t line_no = 0;

  struct PaperSlot {
    std::optional<PaperRecord> record;
    std::optional<ParseError> error;
  };
  std::vector<PaperSlot> parsed;
  while (read_batch(papers, options.batch_lines, lines, numbers, line_no) > 0) {
    summary.paper_lines += lines.size();
    parsed.assign(lines.size(), {});
    for_shards(lines.size(), threads, [&](std::size_t b, std::size_t e, unsigned) {
      for (std::size_t i = b; i < e; ++i) {
        try {
          parsed[i].record = parse_paper_record(lines[i], numbers[i]);
        } catch (const ParseError& err) {
          parsed[i].error = err;
        }
      }
    });
    for (auto& slot : parsed) {
      if (slot.error) {
        ++summary.rejected_papers;
        note_error(summary, options, *slot.error);
      } else if (!builder.add_paper(std::move(*slot.record))) {
        ++summary.duplicate_papers;
      }
    }
  }
  summary.papers = builder.papers().paper_count();

  // Edge shards resolve against the finished, read-only id table and merge by
  // concatenation plus summed counters.
  struct EdgeShard {
    std::vector<std::pair<PaperIdx, PaperIdx>> resolved;
    std::uint64_t dangling = 0;
    std::vector<ParseError> errors;
  };
  std::vector<EdgeShard> shards(threads);
  const CorpusIndex& table = builder.papers();
  line_no = 0;
  while (read_batch(edges, options.batch_lines, lines, numbers, line_no) > 0) {
    summary.edge_lines += lines.size();
    for_shards(lines.size(), threads, [&](std::size_t b, std::size_t e, unsigned t) {
      auto& shard = shards[t];
      for (std::size_t i = b; i < e; ++i) {
        try {
          auto edge = parse_citation_edge(lines[i], numbers[i]);
          auto s = table.find(edge.src);
          auto d = table.find(edge.tgt);
          if (s && d) {
            shard.resolved.emplace_back(*s, *d);
          } else {
            ++shard.dangling;
          }
        } catch (const ParseError& err) {
          shard.errors.push_back(err);
        }
      }
    });
    for (auto& shard : shards) {
      for (const auto& err : shard.errors) {
        ++summary.rejected_edges;
        note_error(summary, options, err);
      }
      for (auto [s, d] : shard.resolved) builder.add_resolved_edge(s, d);
      builder.add_dangling(shard.dangling);
      summary.dangling_edges += shard.dangling;
      summary.resolvable_edges += shard.resolved.size();
      shard.resolved.clear();
      shard.dangling = 0;
      shard.errors.clear();
    }
  }
  summary.accepted_edges = summary.resolvable_edges + summary.dangling_edges;

  CorpusIndex index = std::move(builder).finish();
  return {std::move(index), std::move(summary)};
}

BuildResult build_index(const std::filesystem::path& papers, const std::filesystem::path& edges,
                        const IngestOptions& options) {
  std::ifstream p(papers);
  if (!p) throw Error("cannot open paper file " + papers.string());
  std::ifstream e(edges);
  if (!e) throw Error("cannot open edge file " + edges.string());
  return build_index(p, e, options);
}

}  // namespace citefield
