#include "fake_upstream.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace fake {

namespace {

std::string query_value(const std::string& query, const std::string& name) {
  std::size_t pos = 0;
  while (pos < query.size()) {
    auto amp = query.find('&', pos);
    auto part = query.substr(pos, amp == std::string::npos ? std::string::npos : amp - pos);
    if (part.rfind(name + "=", 0) == 0) return part.substr(name.size() + 1);
    if (amp == std::string::npos) break;
    pos = amp + 1;
  }
  return {};
}

std::string make_key(const std::string& path, const std::string& offset, const std::string& token,
                     const std::string& venue) {
  std::string k = path;
  if (!offset.empty()) k += "|offset=" + offset;
  if (!token.empty()) k += "|token=" + token;
  if (!venue.empty()) k += "|venue=" + venue;
  return k;
}

}  // namespace

std::string Upstream::key_of(const std::string& path_and_query) {
  const auto q = path_and_query.find('?');
  const std::string path = path_and_query.substr(0, q);
  const std::string query = q == std::string::npos ? "" : path_and_query.substr(q + 1);
  return make_key(path, query_value(query, "offset"), query_value(query, "token"), query_value(query, "venue"));
}

Upstream::Upstream(const std::filesystem::path& fixture, const citefield::s2::Clock* clock) : clock_(clock) {
  std::ifstream in(fixture);
  if (!in) throw std::runtime_error("cannot open fixture " + fixture.string());
  const auto doc = nlohmann::json::parse(in);
  for (const auto& r : doc.at("routes")) {
    const std::string offset = r.contains("offset") ? std::to_string(r["offset"].get<long>()) : "";
    const std::string key = make_key(r.at("path"), offset, r.value("token", ""), r.value("venue", ""));
    Route route;
    for (const auto& resp : r.at("responses")) {
      citefield::s2::HttpResponse h;
      h.status = resp.at("status");
      h.body = resp.at("body").dump();
      const auto headers = resp.value("headers", nlohmann::json::object());
      for (const auto& [k, v] : headers.items()) h.headers[k] = v.get<std::string>();
      route.responses.push_back(std::move(h));
    }
    routes_[key] = std::move(route);
  }
}

citefield::s2::HttpResponse Upstream::get(const std::string& path_and_query,
                                          const std::map<std::string, std::string>& headers) {
  std::lock_guard lock(mu_);
  times_.push_back(clock_ ? clock_->now() : 0.0);
  requests_.push_back(path_and_query);
  last_headers_ = headers;
  if (offline_) throw std::runtime_error("connection refused");
  auto it = routes_.find(key_of(path_and_query));
  if (it == routes_.end()) return {404, R"({"error":"not found"})", {}};
  auto& route = it->second;
  const auto& r = route.responses[std::min(route.next, route.responses.size() - 1)];
  ++route.next;
  return r;
}

std::size_t Upstream::calls() const {
  std::lock_guard lock(mu_);
  return times_.size();
}

std::vector<double> Upstream::call_times() const {
  std::lock_guard lock(mu_);
  return times_;
}

std::vector<std::string> Upstream::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::map<std::string, std::string> Upstream::last_headers() const {
  std::lock_guard lock(mu_);
  return last_headers_;
}

void Upstream::set_offline(bool offline) {
  std::lock_guard lock(mu_);
  offline_ = offline;
}

}  // namespace fake
