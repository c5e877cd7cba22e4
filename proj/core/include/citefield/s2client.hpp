#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "citefield/errors.hpp"
#include "citefield/fields.hpp"

namespace citefield::s2 {

enum class EntityKind { Paper, Author, Venue };

std::string_view to_string(EntityKind kind);
std::optional<EntityKind> parse_entity_kind(std::string_view s);

struct EntityRef {
  EntityKind kind = EntityKind::Paper;
  std::string raw;  // input as given
  std::string id;   // canonical upstream id, e.g. "ACL:P19-1234", "CorpusId:42"
  std::string rule; // which pattern resolved it

  bool operator==(const EntityRef&) const = default;
};

class ResolutionError : public Error {
 public:
  using Error::Error;
};
/// Upstream says the entity does not exist.
class NotFoundError : public Error {
 public:
  using Error::Error;
};
/// Upstream unreachable or misbehaving after all retries.
class UpstreamError : public Error {
 public:
  using Error::Error;
};
/// Upstream kept rate-limiting after all retries.
class RateLimitedError : public Error {
 public:
  using Error::Error;
};

/// Detects the identifier kind by pattern. `hint` is the kind implied by the
/// caller (an author endpoint accepts bare numeric ids, a venue endpoint any name).
EntityRef resolve_entity(std::string_view input, std::optional<EntityKind> hint = std::nullopt);

// --- plumbing ---

/// Seconds since the Unix epoch; sleeping may be simulated.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now() const = 0;
  virtual void sleep_for(double seconds) = 0;
};

class SystemClock : public Clock {
 public:
  double now() const override;
  void sleep_for(double seconds) override;
};

/// Time only moves through sleep_for() and advance().
class ManualClock : public Clock {
 public:
  explicit ManualClock(double start = 1'700'000'000.0) : t_(start) {}
  double now() const override { return t_.load(); }
  void sleep_for(double seconds) override { advance(seconds); }
  void advance(double seconds);

 private:
  std::atomic<double> t_;
};

struct HttpResponse {
  int status = 0;
  std::string body;
  std::map<std::string, std::string> headers;  // lowercase names
};

/// One GET against the upstream API. Throws std::runtime_error on network failure.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse get(const std::string& path_and_query, const std::map<std::string, std::string>& headers) = 0;
};

/// httplib-backed transport, e.g. "https://api.semanticscholar.org".
std::unique_ptr<HttpTransport> make_http_transport(const std::string& base_url, double timeout_seconds = 30.0);

/// Token bucket: `burst` tokens, refilled at `rate` per second.
class RateLimiter {
 public:
  RateLimiter(double rate, double burst, Clock& clock);

  /// Blocks (through the clock) until a token is available and takes it.
  void acquire();
  bool try_acquire();

 private:
  void refill();

  double rate_;
  double burst_;
  Clock& clock_;
  double tokens_;
  double last_;
  std::mutex mu_;
};

struct RetryPolicy {
  int max_attempts = 4;
  double base_delay = 1.0;  // seconds, doubled per attempt
  double max_delay = 60.0;
};

/// Backoff before attempt `attempt + 1` (attempt is 0-based); Retry-After wins when larger.
double retry_delay(const RetryPolicy& policy, int attempt, std::optional<double> retry_after);

/// JSON documents at `<root>/<kind>/<id>.json`, expiring after `max_age_days`.
class DiskCache {
 public:
  DiskCache(std::filesystem::path root, int max_age_days, const Clock& clock);

  std::optional<nlohmann::json> get(std::string_view kind, std::string_view id) const;
  /// Atomic replace (write to a temp file, then rename).
  void put(std::string_view kind, std::string_view id, const nlohmann::json& data) const;
  std::filesystem::path path_for(std::string_view kind, std::string_view id) const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
  int max_age_days_;
  const Clock& clock_;
};

// --- upstream data ---

struct LinkedPaper {
  std::string paper_id;
  std::optional<int> year;
  FieldSet fields;  // top-level scheme

  bool operator==(const LinkedPaper&) const = default;
};

struct PaperLinks {
  std::string paper_id;
  std::string title;
  std::optional<int> year;
  FieldSet fields;
  std::vector<LinkedPaper> references;
  std::vector<LinkedPaper> citations;
  std::uint64_t unresolved_links = 0;  // upstream entries without a paper id
  bool complete = true;
  std::string fetch_date;  // YYYY-MM-DD (UTC)
};

nlohmann::json to_json(const PaperLinks& links);
PaperLinks paper_links_from_json(const nlohmann::json& j);

/// Field-of-study labels of one upstream paper object: `s2FieldsOfStudy`
/// categories, falling back to `fieldsOfStudy`. Unknown names are dropped.
FieldSet upstream_fields(const nlohmann::json& paper);

struct PaperList {
  std::vector<std::string> paper_ids;
  bool complete = true;
};

struct ClientConfig {
  std::string api_key;  // sent as x-api-key when non-empty
  double requests_per_second = 1.0;
  double burst = 1.0;
  RetryPolicy retry;
  int page_size = 1000;
  int max_pages = 10;  // per list; more pages mark the result incomplete
  std::size_t max_papers_per_entity = 100;
  std::optional<std::filesystem::path> cache_dir;
  int cache_days = 30;
};

/// Reads CITEFIELD_CACHE_DIR and S2_API_KEY into `config` when set.
void apply_environment(ClientConfig& config);

/// Scholarly-graph API client. Every upstream request passes through the rate
/// limiter; requests are serialized.
class Client {
 public:
  Client(ClientConfig config, HttpTransport& transport, Clock& clock);

  /// References and citations with field labels.
  PaperLinks fetch_paper(const std::string& paper_id);
  PaperList author_papers(const std::string& author_id);
  PaperList venue_papers(const std::string& venue);

  std::uint64_t upstream_requests() const { return requests_.load(); }
  const ClientConfig& config() const { return config_; }

 private:
  nlohmann::json get_json(const std::string& path_and_query);
  std::string fetch_date() const;

  ClientConfig config_;
  HttpTransport& transport_;
  Clock& clock_;
  RateLimiter limiter_;
  std::optional<DiskCache> cache_;
  std::mutex upstream_mu_;
  std::atomic<std::uint64_t> requests_{0};
};

}  // namespace citefield::s2
