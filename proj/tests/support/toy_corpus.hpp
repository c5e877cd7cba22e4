#pragma once

// Plain-struct corpora with brute-force reference computations. Nothing here
// goes through FlowTensor or the metrics module.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "citefield/corpus.hpp"

namespace toy {

struct Paper {
  std::string id;
  std::optional<int> year;
  std::vector<int> fields;  // top-level ids, non-empty, distinct
  std::vector<int> cs;      // cs-subfield ids
  bool nlp = false;
  std::uint64_t citations = 0;
  std::string title;
};

struct Corpus {
  std::vector<Paper> papers;
  std::vector<std::pair<int, int>> edges;  // (citing, cited) positions into papers
  std::vector<std::pair<std::string, std::string>> dangling;  // edges with an absent endpoint
};

struct GenOptions {
  int fields = 5;          // drawn from ids [0, fields)
  int papers = 200;
  int edges = 1000;
  int max_labels = 3;
  double nlp_share = 0.3;
  double unknown_year_share = 0.05;
  int first_year = 1990;
  int last_year = 2020;
  int dangling = 0;
  /// Every field gets at least one paper that cites something.
  bool every_field_cites = true;
};

Corpus generate(const GenOptions& opt, std::uint64_t seed);

/// Paper and edge JSONL in ingestion format.
std::string papers_jsonl(const Corpus& c);
std::string edges_jsonl(const Corpus& c);

/// Builds the index directly through CorpusBuilder (paper positions == PaperIdx).
citefield::CorpusIndex build(const Corpus& c);

// --- oracles ---

using Filter = std::optional<std::pair<int, int>>;  // inclusive year range; nullopt = all
bool admits(const Filter& f, std::optional<int> y);

/// Per-edge recount of C[fs -> ft] for field x field cells.
std::uint64_t cell(const Corpus& c, int fs, int ft, const Filter& years = std::nullopt);
/// Sum over edges of |F_src| * |F_tgt|.
std::uint64_t attributed_total(const Corpus& c);

/// Counts of a focal NLP row / column: one per label of the other endpoint.
std::vector<std::uint64_t> nlp_out_counts(const Corpus& c, int k, const Filter& years = std::nullopt);
std::vector<std::uint64_t> nlp_in_counts(const Corpus& c, int k, const Filter& years = std::nullopt);

/// Textbook Gini-Simpson with long doubles: (X^2 - sum x^2) / X^2.
long double gini_simpson(const std::vector<std::uint64_t>& counts);

/// ORCP for focal field (focal >= 0) or the NLP scope (focal == -1), over k fields.
std::vector<double> orcp(const Corpus& c, int k, int focal, bool incoming, const Filter& years = std::nullopt);

/// Edge-level percentage of NLP-citing edges landing in NLP.
std::optional<double> nlp_intra_pct(const Corpus& c, const Filter& years = std::nullopt);

}  // namespace toy
