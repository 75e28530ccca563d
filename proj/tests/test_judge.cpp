#include <doctest.h>

#include <atomic>
#include <thread>

#include "test_util.hpp"
#include "wander/errors.hpp"
#include "wander/io.hpp"
#include "wander/judge.hpp"
#include "wander/metrics.hpp"

// After Eigen: the resolver header pulled in here defines an _res macro.
#include <httplib.h>
#include <json.hpp>

using namespace wander;

namespace {

// Local judge endpoint answering every POST with `reply(request body)`.
class FakeJudge {
 public:
  explicit FakeJudge(std::function<std::string(const std::string&)> reply) : reply_(std::move(reply)) {
    server_.Post("/judge", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits;
      res.set_content(reply_(req.body), "text/plain");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeJudge() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/judge"; }

  std::atomic<int> hits{0};

 private:
  std::function<std::string(const std::string&)> reply_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

std::vector<JudgeRecord> records(int n) {
  std::vector<JudgeRecord> out;
  for (int i = 0; i < n; ++i) out.push_back({"q" + std::to_string(i), "a", "p" + std::to_string(i)});
  return out;
}

}  // namespace

TEST_SUITE("judge") {
  TEST_CASE("reply parsing") {
    CHECK(parse_judge_reply("4") == 4);
    CHECK(parse_judge_reply(" 5\n") == 5);
    CHECK(!parse_judge_reply("Score: 4."));
    CHECK(!parse_judge_reply("0"));
    CHECK(!parse_judge_reply("6"));
    CHECK(!parse_judge_reply("45"));
    CHECK(!parse_judge_reply(""));
  }

  TEST_CASE("file source") {
    testing::TempDir dir("judge");
    write_file_atomic(dir / "scores.txt", "5\n4\n3\n2\n1\n");
    FileJudgeSource src(dir / "scores.txt");
    const auto set = fetch_judge_scores(records(5), src);
    CHECK(set.missing.empty());
    CHECK(correctness(set.scores) == 50.0);
    CHECK_THROWS_AS(fetch_judge_scores(records(4), src), LengthMismatch);
    write_file_atomic(dir / "bad.txt", "5\nfive\n");
    FileJudgeSource bad(dir / "bad.txt");
    CHECK_THROWS_AS(bad.score(records(2)), ParseError);
  }

  TEST_CASE("http source scores conforming replies") {
    FakeJudge judge([](const std::string&) { return "4"; });
    HttpJudgeSource src(judge.url(), 3, 5);
    const auto set = fetch_judge_scores(records(3), src);
    CHECK(set.scores == std::vector<int>{4, 4, 4});
    CHECK(judge.hits == 3);
  }

  TEST_CASE("non-conforming replies are retried, then missing") {
    FakeJudge judge([](const std::string& body) {
      const auto j = nlohmann::json::parse(body);
      return j.at("predicted_answer") == "p1" ? std::string("Score: 4.") : std::string("2");
    });
    HttpJudgeSource src(judge.url(), 3, 5);
    const auto set = fetch_judge_scores(records(3), src);
    CHECK(set.scores == std::vector<int>{2, 2});
    CHECK(set.missing == std::vector<int>{1});
    CHECK(judge.hits == 5);
  }

  TEST_CASE("all missing") {
    FakeJudge judge([](const std::string&) { return "excellent"; });
    HttpJudgeSource src(judge.url(), 2, 5);
    CHECK_THROWS_AS(fetch_judge_scores(records(2), src), AllRetriesFailed);
  }

  TEST_CASE("unreachable endpoint") {
    int port = 0;
    {
      // Grab a free port, then release it.
      httplib::Server s;
      port = s.bind_to_any_port("127.0.0.1");
    }
    HttpJudgeSource src("http://127.0.0.1:" + std::to_string(port) + "/judge", 2, 2);
    CHECK_THROWS_AS(src.score(records(1)), SourceUnreachable);
    CHECK_THROWS_AS(HttpJudgeSource("ftp://x", 1, 1), ConfigError);
  }

  TEST_CASE("file and http sources agree") {
    testing::TempDir dir("judge_agree");
    const std::vector<int> scores{5, 4, 3, 2, 1, 3, 4};
    std::string text;
    for (int s : scores) text += std::to_string(s) + "\n";
    write_file_atomic(dir / "scores.txt", text);
    FakeJudge judge([&](const std::string& body) {
      const auto j = nlohmann::json::parse(body);
      const int i = std::stoi(j.at("predicted_answer").get<std::string>().substr(1));
      return std::to_string(scores[static_cast<std::size_t>(i)]);
    });
    auto file = make_judge_source(dir / "scores.txt", std::nullopt);
    auto http = make_judge_source(std::nullopt, judge.url());
    const auto a = fetch_judge_scores(records(7), *file);
    const auto b = fetch_judge_scores(records(7), *http);
    CHECK(a.scores == b.scores);
    CHECK(format_metric_report({}, {{"overall", {}, {}, {}, {}, correctness(a.scores)}}) ==
          format_metric_report({}, {{"overall", {}, {}, {}, {}, correctness(b.scores)}}));
  }
}
