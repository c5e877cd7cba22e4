#include "citefield/s2service.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "citefield/metrics.hpp"
#include "httplib.h"

namespace citefield::s2 {

using nlohmann::ordered_json;

std::uint64_t DiversityReport::outgoing_total() const {
  return std::accumulate(outgoing.begin(), outgoing.end(), std::uint64_t{0});
}

std::uint64_t DiversityReport::incoming_total() const {
  return std::accumulate(incoming.begin(), incoming.end(), std::uint64_t{0});
}

DiversityReport diversity_from_links(const EntityRef& entity, const std::vector<PaperLinks>& links,
                                     const CfdiHistogram* histogram) {
  const auto k = static_cast<std::size_t>(FieldScheme::top_level().size());
  DiversityReport r;
  r.entity = entity;
  r.outgoing.assign(k, 0);
  r.incoming.assign(k, 0);
  std::set<std::string> seen;
  for (const auto& paper : links) {
    if (!seen.insert(paper.paper_id).second) continue;
    r.papers.push_back(paper.paper_id);
    r.complete = r.complete && paper.complete;
    for (const auto& ref : paper.references) {
      ++r.references;
      if (ref.fields.empty()) ++r.unlabeled_references;
      ref.fields.for_each([&](FieldId f) { ++r.outgoing[f.value]; });
    }
    for (const auto& cit : paper.citations) {
      ++r.citations;
      cit.fields.for_each([&](FieldId f) { ++r.incoming[f.value]; });
    }
  }
  if (r.outgoing_total() > 0) {
    r.cfdi = cfdi(r.outgoing);
    if (histogram) r.percentile = histogram->percentile(*r.cfdi);
  }
  if (r.incoming_total() > 0) r.incoming_cfdi = cfdi(r.incoming);
  return r;
}

DiversityReport entity_diversity(const EntityRef& entity, Client& client, const CfdiHistogram* histogram) {
  std::vector<PaperLinks> links;
  bool complete = true;
  if (entity.kind == EntityKind::Paper) {
    links.push_back(client.fetch_paper(entity.id));
  } else {
    PaperList list = entity.kind == EntityKind::Author ? client.author_papers(entity.id) : client.venue_papers(entity.id);
    complete = list.complete;
    const auto cap = client.config().max_papers_per_entity;
    if (list.paper_ids.size() > cap) {
      list.paper_ids.resize(cap);
      complete = false;
    }
    for (const auto& id : list.paper_ids) links.push_back(client.fetch_paper(id));
  }
  auto report = diversity_from_links(entity, links, histogram);
  report.complete = report.complete && complete;
  return report;
}

namespace {

ordered_json counts_json(const std::vector<std::uint64_t>& counts) {
  const auto& scheme = FieldScheme::top_level();
  ordered_json arr = ordered_json::array();
  for (std::size_t f = 0; f < counts.size(); ++f) {
    if (counts[f] == 0) continue;
    const FieldId id{static_cast<std::uint8_t>(f)};
    arr.push_back({{"field", scheme.token(id)}, {"name", scheme.display_name(id)}, {"count", counts[f]}});
  }
  return arr;
}

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

}  // namespace

ordered_json report_json(const DiversityReport& r) {
  ordered_json j;
  j["schema_version"] = kExportSchemaVersion;
  j["entity"] = {{"kind", to_string(r.entity.kind)}, {"raw", r.entity.raw}, {"id", r.entity.id},
                 {"resolved_by", r.entity.rule}};
  j["papers"] = r.papers;
  j["outgoing"] = {{"total", r.outgoing_total()},
                   {"references", r.references},
                   {"unlabeled_references", r.unlabeled_references},
                   {"fields", counts_json(r.outgoing)}};
  j["cfdi"] = optional_number(r.cfdi);
  j["cfdi_defined"] = r.cfdi.has_value();
  j["percentile"] = optional_number(r.percentile);
  j["incoming"] = {{"total", r.incoming_total()}, {"citations", r.citations}, {"fields", counts_json(r.incoming)}};
  j["incoming_cfdi"] = optional_number(r.incoming_cfdi);
  j["complete"] = r.complete;
  return j;
}

ServiceResponse error_response(int status, const std::string& code, const std::string& message) {
  ordered_json j;
  j["error"] = {{"status", status}, {"code", code}, {"message", message}};
  return {status, "application/json", j.dump()};
}

DiversityService::DiversityService(Client& client, std::optional<CfdiHistogram> histogram)
    : client_(client), histogram_(std::move(histogram)) {}

ServiceResponse DiversityService::handle_get(const std::string& path) const {
  if (path == "/healthz") return {200, "text/plain", "ok"};
  if (path == "/v1/corpus/cfdi-distribution") {
    if (!histogram_) return error_response(404, "no_histogram", "no corpus CFDI distribution loaded");
    return {200, "application/json", histogram_json(*histogram_).dump()};
  }
  static const std::string prefix = "/v1/diversity/";
  if (path.rfind(prefix, 0) != 0) return error_response(404, "not_found", "no route for " + path);
  const auto rest = path.substr(prefix.size());
  const auto slash = rest.find('/');
  const auto kind = parse_entity_kind(rest.substr(0, slash));
  if (!kind || slash == std::string::npos) return error_response(404, "not_found", "no route for " + path);
  try {
    const EntityRef ref = resolve_entity(rest.substr(slash + 1), *kind);
    if (ref.kind != *kind) {
      return error_response(400, "bad_id", "identifier names a " + std::string(to_string(ref.kind)) + ", not a " +
                                               std::string(to_string(*kind)));
    }
    const auto report = entity_diversity(ref, client_, histogram_ ? &*histogram_ : nullptr);
    return {200, "application/json", report_json(report).dump()};
  } catch (const ResolutionError& e) {
    return error_response(400, "bad_id", e.what());
  } catch (const NotFoundError& e) {
    return error_response(404, "unknown_entity", e.what());
  } catch (const RateLimitedError& e) {
    return error_response(429, "rate_limited", e.what());
  } catch (const std::exception& e) {
    return error_response(502, "upstream_failure", e.what());
  }
}

struct ServiceServer::Impl {
  const DiversityService& service;
  httplib::Server server;
};

ServiceServer::ServiceServer(const DiversityService& service) : impl_(new Impl{service, {}}) {
  impl_->server.Get(".*", [this](const httplib::Request& req, httplib::Response& res) {
    const auto r = impl_->service.handle_get(req.path);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  });
}

ServiceServer::~ServiceServer() { stop(); }

int ServiceServer::bind(const ServeConfig& config) {
  int port = config.port;
  if (port == 0) {
    port = impl_->server.bind_to_any_port(config.host);
  } else if (!impl_->server.bind_to_port(config.host, port)) {
    port = -1;
  }
  if (port < 0) throw Error("cannot bind " + config.host + ":" + std::to_string(config.port));
  return port;
}

void ServiceServer::listen() { impl_->server.listen_after_bind(); }

void ServiceServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace citefield::s2
