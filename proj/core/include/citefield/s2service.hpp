#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "citefield/reports.hpp"
#include "citefield/s2client.hpp"

namespace citefield::s2 {

struct DiversityReport {
  EntityRef entity;
  std::vector<std::string> papers;   // pooled papers (one for a paper entity)
  std::vector<std::uint64_t> outgoing;  // per top-level field, multi-field rule
  std::vector<std::uint64_t> incoming;
  std::optional<double> cfdi;           // unset when there are no labelled references
  std::optional<double> incoming_cfdi;
  std::optional<double> percentile;     // against the corpus histogram
  std::uint64_t references = 0;
  std::uint64_t citations = 0;
  std::uint64_t unlabeled_references = 0;
  bool complete = true;

  std::uint64_t outgoing_total() const;
  std::uint64_t incoming_total() const;
};

/// Pools counts over `links` (duplicate paper ids counted once).
DiversityReport diversity_from_links(const EntityRef& entity, const std::vector<PaperLinks>& links,
                                     const CfdiHistogram* histogram = nullptr);

DiversityReport entity_diversity(const EntityRef& entity, Client& client, const CfdiHistogram* histogram = nullptr);

nlohmann::ordered_json report_json(const DiversityReport& report);

struct ServiceResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Routes requests to library calls; holds no socket.
class DiversityService {
 public:
  DiversityService(Client& client, std::optional<CfdiHistogram> histogram);

  ServiceResponse handle_get(const std::string& path) const;

 private:
  Client& client_;
  std::optional<CfdiHistogram> histogram_;
};

ServiceResponse error_response(int status, const std::string& code, const std::string& message);

struct ServeConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
};

/// httplib server around a DiversityService.
class ServiceServer {
 public:
  explicit ServiceServer(const DiversityService& service);
  ~ServiceServer();

  /// Binds and returns the bound port. Throws Error when binding fails.
  int bind(const ServeConfig& config);
  /// Blocks until stop().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace citefield::s2
