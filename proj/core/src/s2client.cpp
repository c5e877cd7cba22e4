#include "citefield/s2client.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "httplib.h"

namespace citefield::s2 {

using nlohmann::json;

std::string_view to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::Paper: return "paper";
    case EntityKind::Author: return "author";
    case EntityKind::Venue: return "venue";
  }
  return "?";
}

std::optional<EntityKind> parse_entity_kind(std::string_view s) {
  if (s == "paper") return EntityKind::Paper;
  if (s == "author") return EntityKind::Author;
  if (s == "venue") return EntityKind::Venue;
  return std::nullopt;
}

// --- resolution ---

namespace {

std::string trim_copy(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && lower(std::string(s.substr(0, prefix.size()))) == prefix;
}

EntityRef make_ref(EntityKind kind, std::string_view raw, std::string id, std::string rule) {
  return {kind, std::string(raw), std::move(id), std::move(rule)};
}

const std::regex kHex40{"^[0-9a-fA-F]{40}$"};
const std::regex kDigits{"^[0-9]+$"};
const std::regex kOldAnthology{"^([A-Za-z])([0-9]{2})-([0-9]{4})(v[0-9]+)?$"};
const std::regex kNewAnthology{"^([0-9]{4}\\.[A-Za-z0-9]+(?:-[A-Za-z0-9]+)*\\.[0-9]+)(v[0-9]+)?$"};
const std::regex kS2Paper{"^(?:https?://)?(?:www\\.|api\\.)?semanticscholar\\.org/(?:graph/v1/)?paper/(?:[^/?#]+/)?([0-9a-fA-F]{40})(?:[/?#].*)?$"};
const std::regex kS2Author{"^(?:https?://)?(?:www\\.)?semanticscholar\\.org/author/(?:[^/?#]+/)?([0-9]+)(?:[/?#].*)?$"};
const std::regex kAnthologyUrl{"^(?:https?://)?(?:www\\.)?(?:aclanthology\\.org|aclanthology\\.info/papers|aclweb\\.org/anthology)/(?:papers/[A-Z]/[A-Z][0-9]{2}/)?([^/?#]+?)(?:\\.pdf|\\.bib)?/?(?:[?#].*)?$"};
const std::regex kArxiv{"^(?:arxiv:|(?:https?://)?arxiv\\.org/(?:abs|pdf)/)([0-9]{4}\\.[0-9]{4,5})(?:v[0-9]+)?(?:\\.pdf)?$", std::regex::icase};
const std::regex kDoi{"^(?:doi:|(?:https?://)?(?:dx\\.)?doi\\.org/)?(10\\.[0-9]{4,9}/\\S+)$", std::regex::icase};

std::optional<std::string> anthology_id(std::string_view s) {
  std::smatch m;
  std::string str(s);
  if (std::regex_match(str, m, kOldAnthology)) {
    std::string letter = m[1].str();
    letter[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(letter[0])));
    return letter + m[2].str() + "-" + m[3].str();
  }
  if (std::regex_match(str, m, kNewAnthology)) return m[1].str();
  return std::nullopt;
}

}  // namespace

EntityRef resolve_entity(std::string_view input, std::optional<EntityKind> hint) {
  const std::string s = trim_copy(input);
  if (s.empty()) throw ResolutionError("empty identifier");
  std::smatch m;

  if (starts_with_ci(s, "author:")) {
    std::string rest = trim_copy(std::string_view(s).substr(7));
    if (!std::regex_match(rest, kDigits)) throw ResolutionError("author ids are numeric: \"" + std::string(input) + "\"");
    return make_ref(EntityKind::Author, input, rest, "author-prefix");
  }
  if (starts_with_ci(s, "venue:")) {
    std::string rest = trim_copy(std::string_view(s).substr(6));
    if (rest.empty()) throw ResolutionError("empty venue name");
    return make_ref(EntityKind::Venue, input, rest, "venue-prefix");
  }
  if (hint == EntityKind::Venue) return make_ref(EntityKind::Venue, input, s, "venue-name");

  if (std::regex_match(s, m, kS2Author)) return make_ref(EntityKind::Author, input, m[1].str(), "s2-author-url");
  if (std::regex_match(s, kDigits)) {
    if (hint == EntityKind::Author) return make_ref(EntityKind::Author, input, s, "author-id");
    throw ResolutionError("bare number \"" + s + "\" is ambiguous; use CorpusId:N or author:N");
  }
  if (std::regex_match(s, kHex40)) return make_ref(EntityKind::Paper, input, lower(s), "s2-paper-id");
  if (std::regex_match(s, m, kS2Paper)) return make_ref(EntityKind::Paper, input, lower(m[1].str()), "s2-paper-url");
  if (starts_with_ci(s, "corpusid:")) {
    std::string rest = trim_copy(std::string_view(s).substr(9));
    if (!std::regex_match(rest, kDigits)) throw ResolutionError("CorpusId must be numeric: \"" + s + "\"");
    return make_ref(EntityKind::Paper, input, "CorpusId:" + rest, "corpus-id");
  }
  if (starts_with_ci(s, "acl:")) {
    if (auto id = anthology_id(std::string_view(s).substr(4))) {
      return make_ref(EntityKind::Paper, input, "ACL:" + *id, "acl-prefix");
    }
    throw ResolutionError("malformed ACL Anthology id \"" + s + "\"");
  }
  if (std::regex_match(s, m, kAnthologyUrl)) {
    if (auto id = anthology_id(m[1].str())) return make_ref(EntityKind::Paper, input, "ACL:" + *id, "anthology-url");
    throw ResolutionError("anthology link \"" + s + "\" does not name a single paper");
  }
  if (auto id = anthology_id(s)) return make_ref(EntityKind::Paper, input, "ACL:" + *id, "anthology-id");
  if (std::regex_match(s, m, kArxiv)) return make_ref(EntityKind::Paper, input, "ARXIV:" + m[1].str(), "arxiv");
  if (std::regex_match(s, m, kDoi)) return make_ref(EntityKind::Paper, input, "DOI:" + m[1].str(), "doi");

  throw ResolutionError("unrecognized identifier \"" + s + "\"");
}

// --- clocks ---

double SystemClock::now() const {
  using namespace std::chrono;
  return duration<double>(system_clock::now().time_since_epoch()).count();
}

void SystemClock::sleep_for(double seconds) {
  if (seconds > 0) std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

void ManualClock::advance(double seconds) {
  if (seconds <= 0) return;
  double cur = t_.load();
  while (!t_.compare_exchange_weak(cur, cur + seconds)) {
  }
}

// --- transport ---

namespace {

class HttplibTransport : public HttpTransport {
 public:
  HttplibTransport(std::string base_url, double timeout) : base_(std::move(base_url)), timeout_(timeout) {}

  HttpResponse get(const std::string& path_and_query, const std::map<std::string, std::string>& headers) override {
    httplib::Client cli(base_);
    const auto secs = static_cast<time_t>(timeout_);
    cli.set_connection_timeout(secs, 0);
    cli.set_read_timeout(secs, 0);
    cli.set_follow_location(true);
    httplib::Headers h(headers.begin(), headers.end());
    auto res = cli.Get(path_and_query, h);
    if (!res) throw std::runtime_error("upstream request failed: " + httplib::to_string(res.error()));
    HttpResponse out;
    out.status = res->status;
    out.body = std::move(res->body);
    for (const auto& [k, v] : res->headers) out.headers[lower(k)] = v;
    return out;
  }

 private:
  std::string base_;
  double timeout_;
};

}  // namespace

std::unique_ptr<HttpTransport> make_http_transport(const std::string& base_url, double timeout_seconds) {
  return std::make_unique<HttplibTransport>(base_url, timeout_seconds);
}

// --- rate limiting and retries ---

RateLimiter::RateLimiter(double rate, double burst, Clock& clock)
    : rate_(rate), burst_(burst), clock_(clock), tokens_(burst), last_(clock.now()) {
  if (!(rate > 0) || !(burst >= 1)) throw std::invalid_argument("rate limiter needs rate > 0 and burst >= 1");
}

void RateLimiter::refill() {
  const double now = clock_.now();
  if (now > last_) {
    tokens_ = std::min(burst_, tokens_ + (now - last_) * rate_);
    last_ = now;
  }
}

void RateLimiter::acquire() {
  std::lock_guard lock(mu_);
  refill();
  if (tokens_ < 1.0) {
    clock_.sleep_for((1.0 - tokens_) / rate_);
    // credit the wait exactly; re-reading the clock can lose sub-ulp amounts
    tokens_ = 1.0;
    last_ = std::max(last_, clock_.now());
  }
  tokens_ -= 1.0;
}

bool RateLimiter::try_acquire() {
  std::lock_guard lock(mu_);
  refill();
  if (tokens_ < 1.0) return false;
  tokens_ -= 1.0;
  return true;
}

double retry_delay(const RetryPolicy& policy, int attempt, std::optional<double> retry_after) {
  double d = std::min(policy.max_delay, policy.base_delay * std::ldexp(1.0, attempt));
  if (retry_after && *retry_after > d) d = *retry_after;
  return d;
}

// --- cache ---

namespace {

std::string safe_name(std::string_view id) {
  std::string out;
  for (unsigned char c : id) {
    out += (std::isalnum(c) || c == '-' || c == '.' || c == '_') ? static_cast<char>(c) : '_';
  }
  if (out.empty() || out[0] == '.') out.insert(out.begin(), '_');
  // distinct ids must not collide after escaping
  if (out != id) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : id) h = (h ^ c) * 1099511628211ULL;
    out += "-" + std::to_string(h % 1000000007ULL);
  }
  return out;
}

std::string utc_date(double unix_seconds) {
  std::time_t t = static_cast<std::time_t>(unix_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[16];
  std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
  return buf;
}

}  // namespace

DiskCache::DiskCache(std::filesystem::path root, int max_age_days, const Clock& clock)
    : root_(std::move(root)), max_age_days_(max_age_days), clock_(clock) {}

std::filesystem::path DiskCache::path_for(std::string_view kind, std::string_view id) const {
  return root_ / std::string(kind) / (safe_name(id) + ".json");
}

std::optional<json> DiskCache::get(std::string_view kind, std::string_view id) const {
  std::ifstream in(path_for(kind, id));
  if (!in) return std::nullopt;
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("data")) return std::nullopt;
  if (doc.value("id", std::string{}) != id) return std::nullopt;
  const double fetched = doc.value("fetched_at", 0.0);
  if (clock_.now() - fetched > max_age_days_ * 86400.0) return std::nullopt;
  return doc["data"];
}

void DiskCache::put(std::string_view kind, std::string_view id, const json& data) const {
  const auto path = path_for(kind, id);
  std::filesystem::create_directories(path.parent_path());
  const double now = clock_.now();
  json doc = {{"schema_version", 1},
              {"kind", kind},
              {"id", id},
              {"fetched_at", now},
              {"fetch_date", utc_date(now)},
              {"data", data}};
  static std::atomic<unsigned> counter{0};
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error("cannot write cache file " + tmp.string());
    out << doc.dump();
    if (!out) throw Error("cache write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// --- upstream documents ---

FieldSet upstream_fields(const json& paper) {
  FieldSet out;
  const auto& scheme = FieldScheme::top_level();
  auto add = [&](const json& v) {
    if (!v.is_string()) return;
    if (auto id = scheme.find(v.get<std::string>())) out.insert(*id);
  };
  if (auto it = paper.find("s2FieldsOfStudy"); it != paper.end() && it->is_array()) {
    for (const auto& f : *it) {
      if (f.is_object() && f.contains("category")) add(f["category"]);
    }
  }
  if (out.empty()) {
    if (auto it = paper.find("fieldsOfStudy"); it != paper.end() && it->is_array()) {
      for (const auto& f : *it) add(f);
    }
  }
  return out;
}

namespace {

std::optional<int> json_year(const json& j) {
  auto it = j.find("year");
  if (it == j.end() || !it->is_number_integer()) return std::nullopt;
  return it->get<int>();
}

json linked_to_json(const LinkedPaper& p) {
  json j = {{"paperId", p.paper_id}, {"fields", json::array()}};
  j["year"] = p.year ? json(*p.year) : json(nullptr);
  p.fields.for_each([&](FieldId f) { j["fields"].push_back(FieldScheme::top_level().token(f)); });
  return j;
}

FieldSet fields_from_tokens(const json& arr) {
  FieldSet s;
  for (const auto& t : arr) {
    if (auto id = FieldScheme::top_level().find(t.get<std::string>())) s.insert(*id);
  }
  return s;
}

LinkedPaper linked_from_json(const json& j) {
  return {j.at("paperId").get<std::string>(), json_year(j), fields_from_tokens(j.at("fields"))};
}

std::string encode_component(std::string_view s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~' || c == ':') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

constexpr const char* kPaperFields = "paperId,year,s2FieldsOfStudy,fieldsOfStudy";

}  // namespace

json to_json(const PaperLinks& links) {
  json j = {{"paperId", links.paper_id}, {"title", links.title}, {"fields", json::array()}};
  j["year"] = links.year ? json(*links.year) : json(nullptr);
  links.fields.for_each([&](FieldId f) { j["fields"].push_back(FieldScheme::top_level().token(f)); });
  j["references"] = json::array();
  for (const auto& p : links.references) j["references"].push_back(linked_to_json(p));
  j["citations"] = json::array();
  for (const auto& p : links.citations) j["citations"].push_back(linked_to_json(p));
  j["unresolved"] = links.unresolved_links;
  j["complete"] = links.complete;
  j["fetch_date"] = links.fetch_date;
  return j;
}

PaperLinks paper_links_from_json(const json& j) {
  PaperLinks out;
  out.paper_id = j.at("paperId").get<std::string>();
  out.title = j.value("title", std::string{});
  out.year = json_year(j);
  out.fields = fields_from_tokens(j.at("fields"));
  for (const auto& p : j.at("references")) out.references.push_back(linked_from_json(p));
  for (const auto& p : j.at("citations")) out.citations.push_back(linked_from_json(p));
  out.unresolved_links = j.value("unresolved", std::uint64_t{0});
  out.complete = j.value("complete", true);
  out.fetch_date = j.value("fetch_date", std::string{});
  return out;
}

void apply_environment(ClientConfig& config) {
  if (const char* dir = std::getenv("CITEFIELD_CACHE_DIR"); dir && *dir) config.cache_dir = dir;
  if (const char* key = std::getenv("S2_API_KEY"); key && *key) config.api_key = key;
}

// --- client ---

Client::Client(ClientConfig config, HttpTransport& transport, Clock& clock)
    : config_(std::move(config)),
      transport_(transport),
      clock_(clock),
      limiter_(config_.requests_per_second, config_.burst, clock) {
  if (config_.cache_dir) cache_.emplace(*config_.cache_dir, config_.cache_days, clock_);
}

std::string Client::fetch_date() const { return utc_date(clock_.now()); }

json Client::get_json(const std::string& path_and_query) {
  std::lock_guard lock(upstream_mu_);
  std::map<std::string, std::string> headers;
  if (!config_.api_key.empty()) headers["x-api-key"] = config_.api_key;
  std::string last_error;
  bool rate_limited = false;
  for (int attempt = 0; attempt < config_.retry.max_attempts; ++attempt) {
    limiter_.acquire();
    ++requests_;
    std::optional<double> retry_after;
    try {
      HttpResponse res = transport_.get(path_and_query, headers);
      if (res.status == 200) {
        json doc = json::parse(res.body, nullptr, false);
        if (doc.is_discarded()) throw UpstreamError("upstream returned malformed JSON for " + path_and_query);
        return doc;
      }
      if (res.status == 404 || res.status == 400) throw NotFoundError("upstream has no entity for " + path_and_query);
      rate_limited = res.status == 429;
      last_error = "upstream status " + std::to_string(res.status);
      if (!rate_limited && res.status < 500) throw UpstreamError(last_error + " for " + path_and_query);
      if (auto it = res.headers.find("retry-after"); it != res.headers.end()) {
        char* end = nullptr;
        double v = std::strtod(it->second.c_str(), &end);
        if (end != it->second.c_str()) retry_after = v;
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      rate_limited = false;
      last_error = e.what();
    }
    if (attempt + 1 < config_.retry.max_attempts) clock_.sleep_for(retry_delay(config_.retry, attempt, retry_after));
  }
  if (rate_limited) throw RateLimitedError("upstream rate limit persisted: " + last_error);
  throw UpstreamError("upstream failed after " + std::to_string(config_.retry.max_attempts) + " attempts: " + last_error);
}

PaperLinks Client::fetch_paper(const std::string& paper_id) {
  if (cache_) {
    if (auto hit = cache_->get("paper", paper_id)) return paper_links_from_json(*hit);
  }
  const std::string base = "/graph/v1/paper/" + encode_component(paper_id);
  json meta = get_json(base + "?fields=title,year,s2FieldsOfStudy,fieldsOfStudy");

  PaperLinks out;
  out.paper_id = meta.value("paperId", paper_id);
  if (auto it = meta.find("title"); it != meta.end() && it->is_string()) out.title = it->get<std::string>();
  out.year = json_year(meta);
  out.fields = upstream_fields(meta);
  out.fetch_date = fetch_date();

  auto fetch_list = [&](const char* endpoint, const char* key, std::vector<LinkedPaper>& into) {
    long offset = 0;
    for (int page = 0;; ++page) {
      if (page >= config_.max_pages) {
        out.complete = false;
        return;
      }
      json doc;
      try {
        doc = get_json(base + "/" + endpoint + "?fields=" + kPaperFields + "&offset=" + std::to_string(offset) +
                       "&limit=" + std::to_string(config_.page_size));
      } catch (const UpstreamError&) {
        if (page == 0) throw;
        out.complete = false;
        return;
      } catch (const RateLimitedError&) {
        if (page == 0) throw;
        out.complete = false;
        return;
      }
      for (const auto& row : doc.value("data", json::array())) {
        const auto it = row.find(key);
        if (it == row.end() || !it->is_object() || !(*it).contains("paperId") || !(*it)["paperId"].is_string()) {
          ++out.unresolved_links;
          continue;
        }
        into.push_back({(*it)["paperId"].get<std::string>(), json_year(*it), upstream_fields(*it)});
      }
      auto next = doc.find("next");
      if (next == doc.end() || !next->is_number_integer()) return;
      offset = next->get<long>();
    }
  };
  fetch_list("references", "citedPaper", out.references);
  fetch_list("citations", "citingPaper", out.citations);

  if (cache_ && out.complete) cache_->put("paper", paper_id, to_json(out));
  return out;
}

PaperList Client::author_papers(const std::string& author_id) {
  if (cache_) {
    if (auto hit = cache_->get("author", author_id)) {
      return {hit->at("papers").get<std::vector<std::string>>(), hit->value("complete", true)};
    }
  }
  PaperList out;
  const std::string base = "/graph/v1/author/" + encode_component(author_id) + "/papers?fields=paperId&limit=" +
                           std::to_string(config_.page_size) + "&offset=";
  long offset = 0;
  for (int page = 0;; ++page) {
    if (page >= config_.max_pages) {
      out.complete = false;
      break;
    }
    json doc = get_json(base + std::to_string(offset));
    for (const auto& row : doc.value("data", json::array())) {
      if (row.contains("paperId") && row["paperId"].is_string()) out.paper_ids.push_back(row["paperId"]);
    }
    auto next = doc.find("next");
    if (next == doc.end() || !next->is_number_integer()) break;
    offset = next->get<long>();
  }
  if (cache_ && out.complete) cache_->put("author", author_id, {{"papers", out.paper_ids}, {"complete", true}});
  return out;
}

PaperList Client::venue_papers(const std::string& venue) {
  if (cache_) {
    if (auto hit = cache_->get("venue", venue)) {
      return {hit->at("papers").get<std::vector<std::string>>(), hit->value("complete", true)};
    }
  }
  PaperList out;
  const std::string base = "/graph/v1/paper/search/bulk?fields=paperId&venue=" + encode_component(venue);
  std::string token;
  for (int page = 0;; ++page) {
    if (page >= config_.max_pages) {
      out.complete = false;
      break;
    }
    json doc = get_json(token.empty() ? base : base + "&token=" + encode_component(token));
    for (const auto& row : doc.value("data", json::array())) {
      if (row.contains("paperId") && row["paperId"].is_string()) out.paper_ids.push_back(row["paperId"]);
    }
    auto next = doc.find("token");
    if (next == doc.end() || !next->is_string() || next->get<std::string>().empty()) break;
    token = next->get<std::string>();
  }
  if (out.paper_ids.empty() && out.complete) throw NotFoundError("no papers found for venue \"" + venue + "\"");
  if (cache_ && out.complete) cache_->put("venue", venue, {{"papers", out.paper_ids}, {"complete", true}});
  return out;
}

}  // namespace citefield::s2
