#include "doctest.h"

#include "citefield/errors.hpp"
#include "citefield/flowgraph.hpp"
#include "toy_corpus.hpp"

using namespace citefield;

namespace {

FieldId top(const char* name) { return *FieldScheme::top_level().find(name); }
FlowNode node(const char* name) { return FlowNode::field(top(name)); }

CorpusIndex tiny(std::vector<std::pair<std::vector<const char*>, std::optional<int>>> papers,
                 std::vector<std::pair<int, int>> edges, std::vector<bool> nlp = {}) {
  CorpusBuilder b;
  for (std::size_t i = 0; i < papers.size(); ++i) {
    PaperRecord r;
    r.id = "P" + std::to_string(i);
    r.year = papers[i].second;
    for (auto f : papers[i].first) r.fields.insert(top(f));
    r.is_nlp = i < nlp.size() && nlp[i];
    b.add_paper(std::move(r));
  }
  for (auto [s, t] : edges) b.add_resolved_edge(static_cast<PaperIdx>(s), static_cast<PaperIdx>(t));
  return std::move(b).finish();
}

}  // namespace

TEST_CASE("multi-field attribution") {
  SUBCASE("two-field source") {
    auto idx = tiny({{{"Computer Science", "Linguistics"}, 2010}, {{"Mathematics"}, 2005}}, {{0, 1}});
    auto t = build_flow_tensor(idx, SchemeKind::TopLevel);
    CHECK(t.count(node("Computer Science"), node("Mathematics"), 2010) == 1);
    CHECK(t.count(node("Linguistics"), node("Mathematics"), 2010) == 1);
    CHECK(t.count(node("Linguistics"), node("Mathematics"), 2005) == 0);
    CHECK(t.total() == 2);
    CHECK(t.years() == std::vector<int>{2010});
  }
  SUBCASE("two-field target") {
    auto idx = tiny({{{"Computer Science"}, 2001}, {{"Computer Science", "Psychology"}, 1999}}, {{0, 1}});
    auto t = build_flow_tensor(idx, SchemeKind::TopLevel);
    CHECK(t.count(node("Computer Science"), node("Computer Science")) == 1);
    CHECK(t.count(node("Computer Science"), node("Psychology")) == 1);
    CHECK(t.total() == 2);
  }
}

TEST_CASE("cited-paper year axis") {
  auto idx = tiny({{{"Physics"}, 2010}, {{"Physics"}, 2005}}, {{0, 1}});
  FlowSpec spec;
  spec.year_axis = YearAxis::CitedPaperYear;
  auto t = build_flow_tensor(idx, SchemeKind::TopLevel, spec);
  CHECK(t.count(node("Physics"), node("Physics"), 2005) == 1);
  CHECK(t.count(node("Physics"), node("Physics"), 2010) == 0);
}

TEST_CASE("unknown years only under the all-years filter") {
  auto idx = tiny({{{"Physics"}, std::nullopt}, {{"Physics"}, 2005}}, {{0, 1}});
  auto t = build_flow_tensor(idx, SchemeKind::TopLevel);
  CHECK(t.total() == 1);
  CHECK(t.total(YearRange{kMinYear, kMaxYear}) == 0);
  CHECK(t.years().empty());
}

TEST_CASE("focal row and column") {
  // P0 (NLP, CS) -> P1 (CS, Ling); P1 (NLP) -> P2 (Math); P2 -> P0
  auto idx = tiny({{{"Computer Science"}, 2000}, {{"Computer Science", "Linguistics"}, 2001}, {{"Mathematics"}, 2002}},
                  {{0, 1}, {1, 2}, {2, 0}}, {true, true, false});
  FlowSpec spec;
  spec.focal = PaperScope::nlp();
  auto t = build_flow_tensor(idx, SchemeKind::TopLevel, spec);
  const auto nlp = FlowNode::focal();
  CHECK(t.count(nlp, node("Computer Science")) == 1);
  CHECK(t.count(nlp, node("Linguistics")) == 1);
  CHECK(t.count(nlp, node("Mathematics")) == 1);
  CHECK(t.count(node("Computer Science"), nlp) == 1);  // P1 cited by P0 (CS)
  CHECK(t.count(node("Mathematics"), nlp) == 1);       // P0 cited by P2 (Math)
  CHECK(t.count(node("Computer Science"), nlp) + t.count(node("Linguistics"), nlp) +
            t.count(node("Mathematics"), nlp) ==
        2);
  CHECK(t.count(nlp, nlp) == 1);
  CHECK(t.focal_out_edges() == 2);
  CHECK(t.focal_in_edges() == 2);
  CHECK(t.focal_self_edges() == 1);
  CHECK(t.focal_out_edges(YearRange{2001, 2001}) == 1);
  CHECK(t.total() == 5);  // field cells only: 2 + 2 + 1
}

TEST_CASE("attribution total and additivity against the per-edge oracle") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    toy::GenOptions opt;
    opt.fields = 6;
    opt.papers = 120;
    opt.edges = 900;
    const auto c = toy::generate(opt, seed);
    const auto idx = toy::build(c);
    const auto t = build_flow_tensor(idx, SchemeKind::TopLevel);
    CHECK(t.total() == toy::attributed_total(c));
    for (int fs = 0; fs < 6; ++fs) {
      for (int ft = 0; ft < 6; ++ft) {
        const FlowNode s = FlowNode::field({static_cast<std::uint8_t>(fs)});
        const FlowNode d = FlowNode::field({static_cast<std::uint8_t>(ft)});
        CHECK(t.count(s, d) == toy::cell(c, fs, ft));
        CHECK(t.count(s, d, YearRange{2000, 2009}) == toy::cell(c, fs, ft, std::pair{2000, 2009}));
      }
    }

    // split edges into two corpora with the same papers
    toy::Corpus a = c, b = c;
    a.edges.clear();
    b.edges.clear();
    for (std::size_t i = 0; i < c.edges.size(); ++i) (i % 3 ? a : b).edges.push_back(c.edges[i]);
    auto ta = build_flow_tensor(toy::build(a), SchemeKind::TopLevel);
    ta += build_flow_tensor(toy::build(b), SchemeKind::TopLevel);
    CHECK(ta == t);
  }
}

TEST_CASE("threaded aggregation equals sequential") {
  toy::GenOptions opt;
  opt.papers = 400;
  opt.edges = 5000;
  const auto idx = toy::build(toy::generate(opt, 77));
  FlowSpec seq, par;
  seq.focal = par.focal = PaperScope::nlp();
  par.threads = 4;
  CHECK(build_flow_tensor(idx, SchemeKind::TopLevel, seq) == build_flow_tensor(idx, SchemeKind::TopLevel, par));
}

TEST_CASE("scopes restrict edges") {
  toy::GenOptions opt;
  opt.papers = 200;
  opt.edges = 2000;
  const auto c = toy::generate(opt, 9);
  const auto idx = toy::build(c);
  FlowSpec spec;
  spec.src_scope = PaperScope::nlp();
  const auto t = build_flow_tensor(idx, SchemeKind::TopLevel, spec);
  std::uint64_t expected = 0;
  for (auto [s, d] : c.edges) {
    if (c.papers[s].nlp) expected += c.papers[s].fields.size() * c.papers[d].fields.size();
  }
  CHECK(t.total() == expected);
}

TEST_CASE("shares") {
  FlowTensor t(SchemeKind::TopLevel, SchemeKind::TopLevel, "NLP");
  t.add(FlowNode::focal(), node("Computer Science"), 2000, 8);
  t.add(FlowNode::focal(), node("Linguistics"), 2000, 2);
  t.add(node("Computer Science"), FlowNode::focal(), 2000, 79);
  t.add(node("Linguistics"), FlowNode::focal(), 2000, 21);

  auto out = outgoing_shares(t, FlowNode::focal(), FieldScheme::top_level().all());
  CHECK(out.denominator == 10);
  CHECK(out.rows.size() == 23);
  CHECK(*out.percent(top("Computer Science")) == doctest::Approx(80.0).epsilon(1e-12));
  CHECK(*out.percent(top("Linguistics")) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(*out.percent(top("Physics")) == 0.0);

  auto in = incoming_shares(t, FlowNode::focal(), FieldScheme::top_level().all());
  CHECK(*in.percent(top("Computer Science")) == doctest::Approx(79.0).epsilon(1e-12));
  CHECK(*in.percent(top("Linguistics")) == doctest::Approx(21.0).epsilon(1e-12));

  auto only_cs = outgoing_shares(t, FlowNode::focal(), fields::cs_only());
  CHECK(*only_cs.percent(top("Computer Science")) == 100.0);
  CHECK_FALSE(only_cs.percent(top("Linguistics")));

  CHECK(incoming_shares(t, FlowNode::focal(), FieldScheme::top_level().all(), YearRange{2010, 2020}).empty());
}

TEST_CASE("flow slices carry consistent marginals") {
  FlowTensor t(SchemeKind::TopLevel, SchemeKind::TopLevel);
  t.add(node("Physics"), node("Physics"), 2000, 3);
  t.add(node("Physics"), node("Art"), 2000, 1);
  t.add(node("Art"), node("Physics"), 2001, 5);
  auto s = flow_slice(t, {node("Physics"), node("Art")}, {node("Physics"), node("Art")});
  CHECK(s.matrix == std::vector<std::vector<std::uint64_t>>{{3, 1}, {5, 0}});
  CHECK(s.row_totals == std::vector<std::uint64_t>{4, 5});
  CHECK(s.col_totals == std::vector<std::uint64_t>{8, 1});
  CHECK(s.total == 9);
  CHECK(s.src_labels == std::vector<std::string>{"Physics", "Art"});
  auto y = flow_slice(t, {node("Physics"), node("Art")}, {node("Physics"), node("Art")}, YearRange{2001, 2001});
  CHECK(y.total == 5);
}

TEST_CASE("transposition swaps rows and columns") {
  toy::GenOptions opt;
  opt.papers = 150;
  opt.edges = 1200;
  const auto idx = toy::build(toy::generate(opt, 4));
  FlowSpec spec;
  spec.focal = PaperScope::nlp();
  const auto t = build_flow_tensor(idx, SchemeKind::TopLevel, spec);
  const auto tt = t.transposed();
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      const auto na = FlowNode::field({static_cast<std::uint8_t>(a)});
      const auto nb = FlowNode::field({static_cast<std::uint8_t>(b)});
      CHECK(tt.count(na, nb) == t.count(nb, na));
    }
    const auto na = FlowNode::field({static_cast<std::uint8_t>(a)});
    CHECK(tt.count(FlowNode::focal(), na) == t.count(na, FlowNode::focal()));
  }
  CHECK(tt.focal_out_edges() == t.focal_in_edges());
  CHECK(tt.transposed() == t);
}
