#pragma once

#include <cstdint>
#include <string>

#include "citefield/corpus.hpp"
#include "citefield/fields.hpp"

namespace bench {

inline std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  return x ^ (x >> 33);
}

inline std::string papers_jsonl(std::uint64_t n) {
  const auto& scheme = citefield::FieldScheme::top_level();
  std::string s;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto h = mix(i);
    s += "{\"id\":\"W" + std::to_string(i) + "\",\"year\":" + std::to_string(1965 + h % 56) + ",\"fields\":[\"" +
         std::string(scheme.display_name({static_cast<std::uint8_t>(h % 23)})) + "\"],\"is_nlp\":" +
         ((h >> 24) % 20 == 0 ? "true" : "false") + "}\n";
  }
  return s;
}

inline std::string edges_jsonl(std::uint64_t papers, std::uint64_t n) {
  std::string s;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto h = mix(i + 12345);
    const auto src = h % papers;
    auto tgt = (h >> 32) % papers;
    if (tgt == src) tgt = (tgt + 1) % papers;
    s += "{\"src\":\"W" + std::to_string(src) + "\",\"tgt\":\"W" + std::to_string(tgt) + "\"}\n";
  }
  return s;
}

/// Builds an index directly, skipping JSON.
inline citefield::CorpusIndex random_index(std::uint64_t papers, std::uint64_t edges) {
  citefield::CorpusBuilder b;
  for (std::uint64_t i = 0; i < papers; ++i) {
    const auto h = mix(i);
    citefield::PaperRecord r;
    r.id = "W" + std::to_string(i);
    r.year = static_cast<int>(1965 + h % 56);
    r.fields.insert({static_cast<std::uint8_t>(h % 23)});
    if ((h >> 8) % 3 == 0) r.fields.insert({static_cast<std::uint8_t>((h >> 16) % 23)});
    r.is_nlp = (h >> 24) % 20 == 0;
    r.citation_count = (h >> 32) % 6000;
    b.add_paper(std::move(r));
  }
  for (std::uint64_t i = 0; i < edges; ++i) {
    const auto h = mix(i + 777);
    const auto src = static_cast<citefield::PaperIdx>(h % papers);
    auto tgt = static_cast<citefield::PaperIdx>((h >> 32) % papers);
    if (tgt == src) tgt = static_cast<citefield::PaperIdx>((tgt + 1) % papers);
    b.add_resolved_edge(src, tgt);
  }
  return std::move(b).finish();
}

}  // namespace bench
