#include <doctest.h>

#include <algorithm>

#include "qa_cases.hpp"
#include "wander/errors.hpp"
#include "wander/qa_schema.hpp"

using namespace wander;

namespace {

bool has_rule(const std::vector<Violation>& vs, const std::string& rule) {
  return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) { return v.rule == rule; });
}

}  // namespace

TEST_SUITE("qa") {
  TEST_CASE("valid sets pass") {
    CHECK(validate_qa_text(qa_cases::valid_set("robot").dump()).empty());
    CHECK(validate_qa_text(qa_cases::valid_set("human").dump()).empty());
    const auto both = nlohmann::json::array({qa_cases::valid_set("robot"), qa_cases::valid_set("human")});
    CHECK(validate_qa_text(both.dump()).empty());
    // One object per line.
    CHECK(validate_qa_text(qa_cases::valid_set().dump() + "\n" + qa_cases::valid_set("human").dump() + "\n").empty());
  }

  TEST_CASE("each mutation raises its rule") {
    for (const auto& m : qa_cases::mutations()) {
      CAPTURE(m.name);
      auto j = qa_cases::valid_set();
      m.apply(j);
      const auto vs = validate_qa_text(j.dump());
      CHECK(has_rule(vs, m.rule));
    }
  }

  TEST_CASE("violations point at the record and field") {
    auto j = qa_cases::valid_set();
    j["qa"][8]["answer"] = qa_cases::words(31);
    const auto vs = validate_qa_text(j.dump());
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].set == 0);
    CHECK(vs[0].record == 8);
    CHECK(vs[0].field == "answer");
    CHECK(format_violation(vs[0]).find("answer-words") != std::string::npos);
  }

  TEST_CASE("word limit is inclusive") {
    auto j = qa_cases::valid_set();
    j["qa"][2]["question"] = qa_cases::words(30);
    CHECK(validate_qa_text(j.dump()).empty());
    CHECK(word_count("  a  b\tc\n") == 3);
    CHECK(word_count("") == 0);
  }

  TEST_CASE("perspective falls back to the default, then to the types") {
    auto j = qa_cases::valid_set("human");
    j.erase("perspective");
    CHECK(validate_qa_text(j.dump()).empty());
    CHECK(has_rule(validate_qa_text(j.dump(), Perspective::robot), "type-perspective"));
    auto r = qa_cases::valid_set("robot");
    r.erase("perspective");
    CHECK(validate_qa_text(r.dump()).empty());
  }

  TEST_CASE("aliases resolve to the canonical type") {
    auto j = qa_cases::valid_set();
    j["qa"][2]["type"] = "Ego-Target Orientation";
    j["qa"][9]["type"] = "Egocentric Spatial Relationship";
    CHECK(validate_qa_text(j.dump()).empty());
    j["qa"][1]["type"] = "Egocentric Direction";
    CHECK(has_rule(validate_qa_text(j.dump()), "type-duplicate"));
  }

  TEST_CASE("writer output validates and round trips") {
    const auto sets = parse_qa_text(nlohmann::json::array({qa_cases::valid_set(), qa_cases::valid_set("human")}).dump());
    REQUIRE(sets.size() == 2);
    CHECK(sets[1].perspective == Perspective::human);
    const std::string text = write_qa_text(sets);
    CHECK(validate_qa_text(text).empty());
    const auto back = parse_qa_text(text);
    REQUIRE(back.size() == 2);
    CHECK(back[0].qa.size() == 10);
    CHECK(back[0].qa[4].answer == sets[0].qa[4].answer);
  }

  TEST_CASE("unparseable input") {
    CHECK_THROWS_AS(validate_qa_text(""), ParseError);
    CHECK_THROWS_AS(validate_qa_text("{not json"), ParseError);
  }
}
