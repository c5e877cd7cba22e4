#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <thread>

#include "citefield/metrics.hpp"
#include "citefield/s2service.hpp"
#include "fake_upstream.hpp"
#include "schema_check.hpp"

using namespace citefield;
using namespace citefield::s2;
using nlohmann::json;

namespace {

const std::string kA(40, 'a'), kB(40, 'b'), kC(40, 'c');
const std::filesystem::path kFixture = CITEFIELD_FIXTURE_DIR "/s2/upstream.json";

std::filesystem::path fresh_dir(const std::string& name) {
  static std::mt19937_64 rng(std::random_device{}());
  auto dir = std::filesystem::temp_directory_path() / ("citefield-" + name + "-" + std::to_string(rng()));
  std::filesystem::remove_all(dir);
  return dir;
}

FieldId top(const char* n) { return *FieldScheme::top_level().find(n); }

ClientConfig fast_config() {
  ClientConfig c;
  c.requests_per_second = 10;
  c.burst = 1;
  return c;
}

}  // namespace

TEST_CASE("entity resolution") {
  auto r = resolve_entity(std::string(40, 'A'));
  CHECK(r.kind == EntityKind::Paper);
  CHECK(r.id == std::string(40, 'a'));

  CHECK(resolve_entity("https://www.semanticscholar.org/paper/Attention-is-All-you-Need-Vaswani/" + kA).id == kA);
  CHECK(resolve_entity("https://aclanthology.org/P19-1234/").id == "ACL:P19-1234");
  CHECK(resolve_entity("https://aclanthology.org/P19-1234.pdf").id == "ACL:P19-1234");
  CHECK(resolve_entity("https://www.aclweb.org/anthology/P19-1234").id == "ACL:P19-1234");
  CHECK(resolve_entity("aclanthology.org/2020.acl-main.1v2.pdf").id == "ACL:2020.acl-main.1");
  CHECK(resolve_entity("P19-1234").id == "ACL:P19-1234");
  CHECK(resolve_entity("p19-1234").id == "ACL:P19-1234");
  CHECK(resolve_entity("ACL:2023.findings-emnlp.12").id == "ACL:2023.findings-emnlp.12");
  CHECK(resolve_entity("CorpusID:215416146").id == "CorpusId:215416146");
  CHECK(resolve_entity("arXiv:1706.03762v5").id == "ARXIV:1706.03762");
  CHECK(resolve_entity("https://doi.org/10.18653/v1/P19-1234").id == "DOI:10.18653/v1/P19-1234");

  auto a = resolve_entity("https://www.semanticscholar.org/author/Jane-Doe/1741101");
  CHECK(a.kind == EntityKind::Author);
  CHECK(a.id == "1741101");
  CHECK(resolve_entity("author:1741101").id == "1741101");
  CHECK(resolve_entity("1741101", EntityKind::Author).kind == EntityKind::Author);

  auto v = resolve_entity("venue:ACL");
  CHECK(v.kind == EntityKind::Venue);
  CHECK(v.id == "ACL");
  CHECK(resolve_entity("EMNLP", EntityKind::Venue).id == "EMNLP");

  CHECK_THROWS_AS(resolve_entity("gibberish!!"), ResolutionError);
  CHECK_THROWS_AS(resolve_entity(""), ResolutionError);
  CHECK_THROWS_AS(resolve_entity("1741101"), ResolutionError);
  CHECK_THROWS_AS(resolve_entity("https://aclanthology.org/volumes/2020.acl-main/"), ResolutionError);
  CHECK_THROWS_AS(resolve_entity("author:abc"), ResolutionError);
  CHECK_THROWS_AS(resolve_entity(std::string(39, 'a')), ResolutionError);
}

TEST_CASE("token bucket never exceeds its budget under a simulated clock") {
  ManualClock clock;
  const double rate = 2.0, burst = 3.0;
  RateLimiter limiter(rate, burst, clock);
  std::vector<double> times;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 400; ++i) {
    limiter.acquire();
    times.push_back(clock.now());
    if (rng() % 4 == 0) clock.advance(static_cast<double>(rng() % 3000) / 1000.0);
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t j = i; j < times.size(); ++j) {
      const double window = times[j] - times[i];
      CHECK(static_cast<double>(j - i + 1) <= burst + rate * window + 1e-6);
    }
  }
  CHECK_THROWS_AS(RateLimiter(0, 1, clock), std::invalid_argument);
  ManualClock c2;
  RateLimiter l2(1, 2, c2);
  CHECK(l2.try_acquire());
  CHECK(l2.try_acquire());
  CHECK_FALSE(l2.try_acquire());
  c2.advance(1.0);
  CHECK(l2.try_acquire());
}

TEST_CASE("retry delays double, cap, and honor Retry-After") {
  RetryPolicy p;
  p.base_delay = 1;
  p.max_delay = 5;
  CHECK(retry_delay(p, 0, std::nullopt) == 1);
  CHECK(retry_delay(p, 1, std::nullopt) == 2);
  CHECK(retry_delay(p, 2, std::nullopt) == 4);
  CHECK(retry_delay(p, 3, std::nullopt) == 5);
  CHECK(retry_delay(p, 0, 30.0) == 30);
}

TEST_CASE("disk cache layout, expiry and atomic replace") {
  ManualClock clock;
  const auto dir = fresh_dir("cache");
  DiskCache cache(dir, 30, clock);
  CHECK_FALSE(cache.get("paper", kA));
  cache.put("paper", kA, json{{"x", 1}});
  CHECK(std::filesystem::exists(dir / "paper" / (kA + ".json")));
  CHECK(cache.get("paper", kA)->at("x") == 1);
  cache.put("paper", kA, json{{"x", 2}});
  CHECK(cache.get("paper", kA)->at("x") == 2);
  cache.put("paper", "ACL:P19-1234", json{{"y", 1}});
  CHECK(cache.get("paper", "ACL:P19-1234")->at("y") == 1);
  CHECK_FALSE(cache.get("paper", "ACL_P19-1234"));
  clock.advance(29 * 86400.0);
  CHECK(cache.get("paper", kA));
  clock.advance(2 * 86400.0);
  CHECK_FALSE(cache.get("paper", kA));
  std::ofstream(dir / "paper" / (kB + ".json")) << "{corrupt";
  CHECK_FALSE(cache.get("paper", kB));
  std::filesystem::remove_all(dir);
}

TEST_CASE("client decodes canned responses exactly") {
  ManualClock clock;
  fake::Upstream up(kFixture, &clock);
  auto cfg = fast_config();
  cfg.api_key = "secret";
  Client client(cfg, up, clock);

  const auto a = client.fetch_paper(kA);
  CHECK(a.title == "Fixture paper A");
  CHECK(a.year == 2019);
  REQUIRE(a.references.size() == 2);
  CHECK(a.references[0].paper_id == "r1");
  CHECK(a.references[0].year == 2015);
  CHECK(a.references[0].fields.contains(fields::computer_science()));
  CHECK(a.references[1].fields.contains(fields::linguistics()));
  REQUIRE(a.citations.size() == 3);  // two pages
  CHECK(a.citations[1].fields.size() == 2);
  CHECK(a.citations[2].paper_id == "c3");
  CHECK(a.complete);
  CHECK(up.calls() == 4);
  CHECK(up.last_headers().at("x-api-key") == "secret");

  const auto c = client.fetch_paper(kC);
  REQUIRE(c.references.size() == 2);
  CHECK(c.unresolved_links == 1);
  CHECK(c.references[0].fields.contains(fields::linguistics()));  // fieldsOfStudy fallback
  CHECK(c.references[1].fields.empty());

  const auto acl = client.fetch_paper("ACL:P19-1234");
  CHECK(acl.references.empty());
  CHECK(acl.complete);

  CHECK(client.author_papers("1741101").paper_ids == std::vector<std::string>{kA, kB, kC});
  CHECK(client.venue_papers("ACL").paper_ids == std::vector<std::string>{kB, kC});
  CHECK_THROWS_AS(client.venue_papers("Nowhere"), NotFoundError);
  CHECK_THROWS_AS(client.fetch_paper(std::string(40, 'f')), NotFoundError);
}

TEST_CASE("pagination cap marks results incomplete") {
  ManualClock clock;
  fake::Upstream up(kFixture, &clock);
  auto cfg = fast_config();
  cfg.max_pages = 1;
  Client client(cfg, up, clock);
  const auto a = client.fetch_paper(kA);
  CHECK(a.citations.size() == 2);
  CHECK_FALSE(a.complete);
  CHECK_FALSE(client.author_papers("1741101").complete);
}

TEST_CASE("retries with backoff, then surface the failure") {
  ManualClock clock;
  fake::Upstream up(kFixture, &clock);
  auto cfg = fast_config();
  cfg.retry.max_attempts = 3;
  cfg.retry.base_delay = 1;
  Client client(cfg, up, clock);

  const double t0 = clock.now();
  CHECK_THROWS_AS(client.fetch_paper(std::string(40, 'e')), UpstreamError);
  CHECK(up.calls() == 3);
  auto times = up.call_times();
  CHECK(times[1] - times[0] >= 1.0);
  CHECK(times[2] - times[1] >= 2.0);

  CHECK_THROWS_AS(client.fetch_paper(std::string(40, 'd')), RateLimitedError);
  times = up.call_times();
  CHECK(times[4] - times[3] >= 5.0);  // Retry-After: 5
  CHECK(clock.now() > t0);

  up.set_offline(true);
  CHECK_THROWS_AS(client.fetch_paper(kB), UpstreamError);
}

TEST_CASE("cache suppresses repeat upstream calls") {
  ManualClock clock;
  fake::Upstream up(kFixture, &clock);
  auto cfg = fast_config();
  cfg.cache_dir = fresh_dir("client-cache");
  {
    Client client(cfg, up, clock);
    const auto first = client.fetch_paper(kA);
    const auto n = up.calls();
    const auto second = client.fetch_paper(kA);
    CHECK(up.calls() == n);
    CHECK(to_json(first) == to_json(second));
    client.author_papers("1741101");
    const auto m = up.calls();
    client.author_papers("1741101");
    CHECK(up.calls() == m);
  }
  {
    // a new client over the same directory is served from disk, even offline
    up.set_offline(true);
    Client again(cfg, up, clock);
    const auto calls = up.calls();
    CHECK(again.fetch_paper(kA).citations.size() == 3);
    CHECK(up.calls() == calls);
  }
  std::filesystem::remove_all(*cfg.cache_dir);
}

TEST_CASE("diversity reports") {
  ManualClock clock;
  fake::Upstream up(kFixture, &clock);
  Client client(fast_config(), up, clock);

  const auto paper = entity_diversity(resolve_entity(kA), client);
  REQUIRE(paper.cfdi);
  CHECK(*paper.cfdi == 0.5);
  CHECK(paper.outgoing[top("Computer Science").value] == 1);
  CHECK(paper.outgoing[top("Linguistics").value] == 1);
  CHECK(paper.outgoing_total() == 2);
  CHECK(paper.incoming_total() == 4);
  CHECK(*paper.incoming_cfdi == cfdi(paper.incoming));
  CHECK_FALSE(paper.percentile);

  const auto empty = entity_diversity(resolve_entity("P19-1234"), client);
  CHECK_FALSE(empty.cfdi);
  CHECK(empty.complete);
  const auto ej = report_json(empty);
  CHECK(ej["cfdi"].is_null());
  CHECK(ej["cfdi_defined"] == false);

  // author pooling equals the union of per-paper counts, recounted from the raw fixture
  const auto author = entity_diversity(resolve_entity("author:1741101"), client);
  std::vector<std::uint64_t> pooled(23, 0);
  std::ifstream in(kFixture);
  const auto doc = json::parse(in);
  for (const auto& r : doc["routes"]) {
    const std::string path = r["path"];
    bool mine = false;
    for (const auto& id : {kA, kB, kC}) mine |= path == "/graph/v1/paper/" + id + "/references";
    if (!mine) continue;
    for (const auto& row : r["responses"][0]["body"]["data"]) {
      const auto& p = row["citedPaper"];
      if (p["paperId"].is_null()) continue;
      std::set<std::string> names;
      for (const auto& fo : p["s2FieldsOfStudy"]) names.insert(fo["category"].get<std::string>());
      if (names.empty() && p["fieldsOfStudy"].is_array())
        for (const auto& n : p["fieldsOfStudy"]) names.insert(n.get<std::string>());
      for (const auto& n : names) ++pooled[top(n.c_str()).value];
    }
  }
  CHECK(author.outgoing == pooled);
  CHECK(author.papers.size() == 3);
  CHECK(*author.cfdi == cfdi(pooled));
  CHECK(author.unlabeled_references == 1);

  CfdiHistogram h;
  for (double v : {0.1, 0.3, 0.5, 0.7}) h.add(v);
  const auto with_pct = diversity_from_links(paper.entity, {client.fetch_paper(kA)}, &h);
  CHECK(*with_pct.percentile == *h.percentile(0.5));
}

TEST_CASE("diversity report invariant: cfdi recomputes from counts") {
  const auto entity = resolve_entity(kA);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    PaperLinks links;
    links.paper_id = "x" + std::to_string(i);
    const int n = static_cast<int>(rng() % 30);
    for (int k = 0; k < n; ++k) {
      LinkedPaper p;
      p.paper_id = std::to_string(k);
      p.fields = FieldSet{rng() & ((1u << 23) - 1)};
      links.references.push_back(p);
    }
    const auto r = diversity_from_links(entity, {links});
    const auto j = json::parse(report_json(r).dump());
    std::vector<std::uint64_t> counts(23, 0);
    for (const auto& f : j["outgoing"]["fields"]) counts[top(f["name"].get<std::string>().c_str()).value] = f["count"];
    if (r.outgoing_total() == 0) {
      CHECK(j["cfdi"].is_null());
    } else {
      CHECK(j["cfdi"].get<double>() == cfdi(counts));
    }
  }
}

TEST_CASE("service routing and status mapping") {
  ManualClock clock;
  fake::Upstream up(kFixture, &clock);
  auto cfg = fast_config();
  cfg.retry.max_attempts = 2;
  Client client(cfg, up, clock);
  CfdiHistogram h;
  h.add(0.2);
  h.add(0.6);
  DiversityService service(client, h);

  auto health = service.handle_get("/healthz");
  CHECK(health.status == 200);
  CHECK(health.body == "ok");

  auto ok = service.handle_get("/v1/diversity/paper/" + kA);
  REQUIRE(ok.status == 200);
  const auto j = json::parse(ok.body);
  CHECK(j["cfdi"].get<double>() == *entity_diversity(resolve_entity(kA), client, &h).cfdi);
  CHECK(j["outgoing"]["fields"].size() == 2);
  CHECK(j["percentile"].get<double>() == *h.percentile(0.5));

  auto bad = service.handle_get("/v1/diversity/paper/gibberish!!");
  CHECK(bad.status == 400);
  CHECK(json::parse(bad.body)["error"]["code"] == "bad_id");
  CHECK(service.handle_get("/v1/diversity/paper/author:12").status == 400);
  CHECK(service.handle_get("/v1/diversity/paper/" + std::string(40, 'f')).status == 404);
  CHECK(service.handle_get("/v1/diversity/author/999").status == 404);
  CHECK(service.handle_get("/v1/diversity/paper/" + std::string(40, 'e')).status == 502);
  CHECK(service.handle_get("/v1/diversity/paper/" + std::string(40, 'd')).status == 429);
  CHECK(service.handle_get("/v1/diversity/author/1741101").status == 200);
  CHECK(service.handle_get("/v1/diversity/venue/ACL").status == 200);
  CHECK(service.handle_get("/v1/nothing").status == 404);

  auto dist = service.handle_get("/v1/corpus/cfdi-distribution");
  CHECK(dist.status == 200);
  CHECK(json::parse(dist.body)["bins"].size() == 20);

  DiversityService bare(client, std::nullopt);
  CHECK(bare.handle_get("/v1/corpus/cfdi-distribution").status == 404);
}

TEST_CASE("service over a real socket") {
  ManualClock clock;
  fake::Upstream up(kFixture, &clock);
  Client client(fast_config(), up, clock);
  DiversityService service(client, std::nullopt);
  ServiceServer server(service);
  const int port = server.bind({"127.0.0.1", 0});
  std::thread th([&] { server.listen(); });

  auto http = make_http_transport("http://127.0.0.1:" + std::to_string(port), 5);
  HttpResponse res;
  for (int i = 0; i < 50; ++i) {
    try {
      res = http->get("/healthz", {});
      break;
    } catch (const std::exception&) {
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
  }
  CHECK(res.status == 200);
  CHECK(res.body == "ok");
  res = http->get("/v1/diversity/paper/" + kA, {});
  CHECK(res.status == 200);
  CHECK(json::parse(res.body)["cfdi"].get<double>() == 0.5);
  res = http->get("/v1/diversity/paper/nonsense", {});
  CHECK(res.status == 400);

  server.stop();
  th.join();
}

TEST_CASE("service responses conform to the published schemas") {
  const auto report_schema = schema::load(CITEFIELD_SCHEMA_DIR "/diversity_report.schema.json");
  const auto error_schema = schema::load(CITEFIELD_SCHEMA_DIR "/error.schema.json");
  ManualClock clock;
  fake::Upstream up(kFixture, &clock);
  auto cfg = fast_config();
  cfg.retry.max_attempts = 1;
  Client client(cfg, up, clock);
  DiversityService service(client, std::nullopt);

  for (const auto& id : {kA, kB, kC, std::string("P19-1234")}) {
    const auto r = service.handle_get("/v1/diversity/paper/" + id);
    REQUIRE(r.status == 200);
    const auto errs = schema::validate(json::parse(r.body), report_schema);
    CHECK_MESSAGE(errs.empty(), (errs.empty() ? "" : errs.front()));
  }
  for (const auto& path : {"/v1/diversity/paper/x", "/v1/diversity/author/999", "/v1/corpus/cfdi-distribution"}) {
    const auto r = service.handle_get(path);
    CHECK(r.status >= 400);
    CHECK(schema::validate(json::parse(r.body), error_schema).empty());
  }

  // the validator itself rejects violations
  auto good = json::parse(service.handle_get("/v1/diversity/paper/" + kA).body);
  auto bad = good;
  bad.erase("cfdi");
  CHECK_FALSE(schema::validate(bad, report_schema).empty());
  bad = good;
  bad["cfdi"] = "0.5";
  CHECK_FALSE(schema::validate(bad, report_schema).empty());
  bad = good;
  bad["entity"]["kind"] = "planet";
  CHECK_FALSE(schema::validate(bad, report_schema).empty());
  bad = good;
  bad["outgoing"]["fields"][0]["count"] = 0;
  CHECK_FALSE(schema::validate(bad, report_schema).empty());
  bad = good;
  bad["extra"] = 1;
  CHECK_FALSE(schema::validate(bad, report_schema).empty());
}
