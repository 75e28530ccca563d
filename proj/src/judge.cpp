#include "wander/judge.hpp"

#include <cstdlib>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "wander/errors.hpp"
#include "wander/io.hpp"

namespace wander {

std::optional<int> parse_judge_reply(const std::string& body) {
  const auto first = body.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return std::nullopt;
  const auto last = body.find_last_not_of(" \t\r\n");
  const std::string core = body.substr(first, last - first + 1);
  if (core.size() != 1 || core[0] < '1' || core[0] > '5') return std::nullopt;
  return core[0] - '0';
}

std::vector<std::optional<int>> FileJudgeSource::score(const std::vector<JudgeRecord>& records) {
  std::istringstream in(read_text_file(path_));
  std::vector<std::optional<int>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto s = parse_judge_reply(line);
    if (!s) throw ParseError("judge file line " + std::to_string(line_no) + ": expected an integer 1..5");
    out.push_back(s);
  }
  if (out.size() != records.size()) {
    throw LengthMismatch("judge file has " + std::to_string(out.size()) + " scores for " +
                         std::to_string(records.size()) + " records");
  }
  return out;
}

HttpJudgeSource::HttpJudgeSource(std::string endpoint, int attempts, int timeout_s)
    : attempts_(attempts), timeout_s_(timeout_s) {
  const std::string scheme = "http://";
  if (endpoint.rfind(scheme, 0) != 0) throw ConfigError("judge endpoint must start with http://");
  const auto slash = endpoint.find('/', scheme.size());
  base_ = slash == std::string::npos ? endpoint : endpoint.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : endpoint.substr(slash);
  if (attempts_ < 1) throw ConfigError("judge attempts must be positive");
}

std::vector<std::optional<int>> HttpJudgeSource::score(const std::vector<JudgeRecord>& records) {
  httplib::Client client(base_);
  client.set_connection_timeout(timeout_s_, 0);
  client.set_read_timeout(timeout_s_, 0);
  std::vector<std::optional<int>> out;
  for (const auto& r : records) {
    const std::string body = nlohmann::ordered_json{{"question", r.question},
                                                    {"correct_answer", r.correct_answer},
                                                    {"predicted_answer", r.predicted_answer}}
                                 .dump();
    std::optional<int> score;
    for (int attempt = 0; attempt < attempts_ && !score; ++attempt) {
      auto res = client.Post(path_, body, "application/json");
      if (!res) throw SourceUnreachable("judge endpoint " + base_ + path_ + ": " + httplib::to_string(res.error()));
      if (res->status == 200) score = parse_judge_reply(res->body);
    }
    out.push_back(score);
  }
  return out;
}

JudgeScoreSet fetch_judge_scores(const std::vector<JudgeRecord>& records, JudgeSource& source) {
  if (records.empty()) throw EmptySet("no records to judge");
  const auto raw = source.score(records);
  JudgeScoreSet set;
  set.record_count = records.size();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i]) {
      set.scores.push_back(*raw[i]);
    } else {
      set.missing.push_back(static_cast<int>(i));
    }
  }
  if (set.scores.empty()) throw AllRetriesFailed("no record received a conforming judge score");
  return set;
}

std::unique_ptr<JudgeSource> make_judge_source(const std::optional<std::filesystem::path>& file,
                                               const std::optional<std::string>& endpoint, int attempts,
                                               int timeout_s) {
  if (file) return std::make_unique<FileJudgeSource>(*file);
  if (endpoint && !endpoint->empty()) return std::make_unique<HttpJudgeSource>(*endpoint, attempts, timeout_s);
  if (const char* env = std::getenv("JUDGE_ENDPOINT"); env && *env) {
    return std::make_unique<HttpJudgeSource>(env, attempts, timeout_s);
  }
  throw ConfigError("no judge source: pass a score file, an endpoint, or set JUDGE_ENDPOINT");
}

}  // namespace wander
