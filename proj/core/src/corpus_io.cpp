// Binary index file:
//   magic "CITEFIDX" | u32 version | payload | u64 FNV-1a of everything before it
// All integers little-endian as laid out in memory on the writing host.

#include <cstring>
#include <fstream>
#include <iterator>

#include "citefield/corpus.hpp"
#include "citefield/errors.hpp"

namespace citefield {

namespace {

constexpr char kMagic[8] = {'C', 'I', 'T', 'E', 'F', 'I', 'D', 'X'};

class Fnv1a {
 public:
  void update(const void* data, std::size_t n) {
    auto p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

class Writer {
 public:
  explicit Writer(std::ofstream& out) : out_(out) {}

  void bytes(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    sum_.update(p, n);
  }
  template <typename T>
  void pod(const T& v) {
    bytes(&v, sizeof v);
  }
  template <typename T>
  void array(const std::vector<T>& v) {
    pod<std::uint64_t>(v.size());
    if (!v.empty()) bytes(v.data(), v.size() * sizeof(T));
  }
  void str(const std::string& s) {
    pod<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::uint64_t checksum() const { return sum_.value(); }

 private:
  std::ofstream& out_;
  Fnv1a sum_;
};

class Reader {
 public:
  Reader(const std::string& buf, std::size_t end) : buf_(buf), end_(end) {}

  void bytes(void* p, std::size_t n) {
    if (n > end_ - pos_) throw IndexFormatError(IndexFormatError::Kind::Truncated, "index file truncated");
    std::memcpy(p, buf_.data() + pos_, n);
    pos_ += n;
  }
  template <typename T>
  T pod() {
    T v;
    bytes(&v, sizeof v);
    return v;
  }
  template <typename T>
  std::vector<T> array() {
    auto n = pod<std::uint64_t>();
    if (n > (end_ - pos_) / sizeof(T)) throw IndexFormatError(IndexFormatError::Kind::Truncated, "index file truncated");
    std::vector<T> v(n);
    if (n) bytes(v.data(), n * sizeof(T));
    return v;
  }
  std::string str() {
    auto n = pod<std::uint32_t>();
    if (n > end_ - pos_) throw IndexFormatError(IndexFormatError::Kind::Truncated, "index file truncated");
    std::string s(buf_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == end_; }

 private:
  const std::string& buf_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_index(const CorpusIndex& index, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IndexFormatError(IndexFormatError::Kind::Io, "cannot write " + path.string());
  Writer w(out);
  w.bytes(kMagic, sizeof kMagic);
  w.pod(kIndexFormatVersion);

  const std::uint64_t n = index.paper_count();
  w.pod(n);
  for (const auto& id : index.ids_) w.str(id);
  for (const auto& t : index.titles_) w.str(t);
  w.array(index.years_);
  w.array(index.fields_);
  w.array(index.cs_subfields_);
  w.array(index.flags_);
  w.array(index.citation_counts_);
  w.array(index.out_offsets_);
  w.array(index.out_targets_);
  w.array(index.in_offsets_);
  w.array(index.in_sources_);
  w.pod(index.dangling_edges_);
  w.pod(index.duplicate_papers_);

  const std::uint64_t sum = w.checksum();
  out.write(reinterpret_cast<const char*>(&sum), sizeof sum);
  out.flush();
  if (!out) throw IndexFormatError(IndexFormatError::Kind::Io, "write failed for " + path.string());
}

CorpusIndex load_index(const std::filesystem::path& path) {
  using Kind = IndexFormatError::Kind;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IndexFormatError(Kind::Io, "cannot open " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IndexFormatError(Kind::Io, "read failed for " + path.string());

  constexpr std::size_t header = sizeof kMagic + sizeof(std::uint32_t);
  if (buf.size() < sizeof kMagic || std::memcmp(buf.data(), kMagic, sizeof kMagic) != 0) {
    throw IndexFormatError(Kind::BadMagic, path.string() + " is not a citefield index");
  }
  if (buf.size() < header + sizeof(std::uint64_t)) {
    throw IndexFormatError(Kind::Checksum, "checksum mismatch: " + path.string() + " is truncated");
  }
  std::uint32_t version;
  std::memcpy(&version, buf.data() + sizeof kMagic, sizeof version);
  if (version != kIndexFormatVersion) {
    throw IndexFormatError(Kind::Version, "index format version " + std::to_string(version) +
                                              " not supported (expected " +
                                              std::to_string(kIndexFormatVersion) + ")");
  }
  const std::size_t body_end = buf.size() - sizeof(std::uint64_t);
  Fnv1a sum;
  sum.update(buf.data(), body_end);
  std::uint64_t stored;
  std::memcpy(&stored, buf.data() + body_end, sizeof stored);
  if (stored != sum.value()) {
    throw IndexFormatError(Kind::Checksum, "checksum mismatch: " + path.string() + " is corrupt or truncated");
  }

  Reader r(buf, body_end);
  char skip[header];
  r.bytes(skip, header);

  CorpusIndex idx;
  const auto n = r.pod<std::uint64_t>();
  for (std::uint64_t i = 0; i < n; ++i) idx.ids_.push_back(r.str());
  idx.titles_.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) idx.titles_.push_back(r.str());
  idx.years_ = r.array<std::int16_t>();
  idx.fields_ = r.array<std::uint32_t>();
  idx.cs_subfields_ = r.array<std::uint32_t>();
  idx.flags_ = r.array<std::uint8_t>();
  idx.citation_counts_ = r.array<std::uint64_t>();
  idx.out_offsets_ = r.array<std::uint64_t>();
  idx.out_targets_ = r.array<PaperIdx>();
  idx.in_offsets_ = r.array<std::uint64_t>();
  idx.in_sources_ = r.array<PaperIdx>();
  idx.dangling_edges_ = r.pod<std::uint64_t>();
  idx.duplicate_papers_ = r.pod<std::uint64_t>();
  if (!r.done()) throw IndexFormatError(Kind::Checksum, "trailing bytes in " + path.string());

  const bool consistent = idx.years_.size() == n && idx.fields_.size() == n && idx.cs_subfields_.size() == n &&
                          idx.flags_.size() == n && idx.citation_counts_.size() == n &&
                          idx.out_offsets_.size() == n + 1 && idx.in_offsets_.size() == n + 1 &&
                          idx.out_offsets_.back() == idx.out_targets_.size() &&
                          idx.in_offsets_.back() == idx.in_sources_.size();
  if (!consistent) throw IndexFormatError(Kind::Checksum, "inconsistent section sizes in " + path.string());
  idx.rebuild_lookup();
  return idx;
}

}  // namespace citefield
