#include "doctest.h"

#include "citefield/fields.hpp"

using namespace citefield;

TEST_CASE("scheme sizes") {
  CHECK(FieldScheme::top_level().size() == 23);
  CHECK(FieldScheme::cs_subfields().size() == 16);
  CHECK(FieldScheme::nlp_subfields().size() == 25);
}

TEST_CASE("lookup by token, name and alias is case-insensitive") {
  const auto& top = FieldScheme::top_level();
  REQUIRE(top.find("Computer Science"));
  CHECK(*top.find("computer science") == fields::computer_science());
  CHECK(*top.find("computer-science") == fields::computer_science());
  CHECK(*top.find("CS") == fields::computer_science());
  CHECK(*top.find("Agricultural and Food Sciences") == *top.find("agricultural-and-food-sciences"));
  CHECK_FALSE(top.find("Alchemy"));

  const auto& cs = FieldScheme::cs_subfields();
  CHECK(cs.find("AI") == cs.find("AI'"));
  CHECK(cs.find("Machine Learning") == cs.find("ML"));
  CHECK(cs.find("ML") != cs.find("AI'"));

  CHECK(FieldScheme::nlp_subfields().find("machine-translation"));
  CHECK(FieldScheme::nlp_subfields().find("shared-tasks"));
}

TEST_CASE("tokens and names are unique within each scheme") {
  for (auto kind : {SchemeKind::TopLevel, SchemeKind::CsSubfield, SchemeKind::NlpSubfield}) {
    const auto& s = FieldScheme::get(kind);
    for (int i = 0; i < s.size(); ++i) {
      const FieldId id{static_cast<std::uint8_t>(i)};
      CHECK(s.find(s.token(id)) == id);
      CHECK(s.find(s.display_name(id)) == id);
    }
  }
}

TEST_CASE("field sets") {
  FieldSet s;
  CHECK(s.empty());
  s.insert({3});
  s.insert({0});
  s.insert({3});
  CHECK(s.size() == 2);
  CHECK(s.contains({0}));
  CHECK_FALSE(s.contains({1}));
  auto ids = s.ids();
  REQUIRE(ids.size() == 2);
  CHECK(ids[0] == FieldId{0});
  CHECK(ids[1] == FieldId{3});
  s.erase({0});
  CHECK(s.size() == 1);

  CHECK(fields::cs_only().size() == 1);
  CHECK(fields::non_cs().size() == 22);
  CHECK((fields::cs_only() | fields::non_cs()) == FieldScheme::top_level().all());
  CHECK((fields::cs_only() & fields::non_cs()).empty());
}
