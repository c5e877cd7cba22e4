#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "citefield/s2client.hpp"

namespace fake {

/// Replays canned responses keyed by request path plus the offset, token and
/// venue query values. A route's responses are consumed in order; the last
/// one repeats. Unknown routes answer 404.
class Upstream : public citefield::s2::HttpTransport {
 public:
  Upstream(const std::filesystem::path& fixture, const citefield::s2::Clock* clock = nullptr);

  citefield::s2::HttpResponse get(const std::string& path_and_query,
                                  const std::map<std::string, std::string>& headers) override;

  std::size_t calls() const;
  std::vector<double> call_times() const;
  std::vector<std::string> requests() const;
  std::map<std::string, std::string> last_headers() const;
  /// Makes every request throw, as if the network were down.
  void set_offline(bool offline);

  static std::string key_of(const std::string& path_and_query);

 private:
  struct Route {
    std::vector<citefield::s2::HttpResponse> responses;
    std::size_t next = 0;
  };
  mutable std::mutex mu_;
  std::map<std::string, Route> routes_;
  const citefield::s2::Clock* clock_;
  std::vector<double> times_;
  std::vector<std::string> requests_;
  std::map<std::string, std::string> last_headers_;
  bool offline_ = false;
};

}  // namespace fake
