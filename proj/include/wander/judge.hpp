#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace wander {

struct JudgeRecord {
  std::string question;
  std::string correct_answer;
  std::string predicted_answer;
};

/// A bare integer 1..5, surrounding whitespace allowed; anything else is
/// non-conforming.
std::optional<int> parse_judge_reply(const std::string& body);

class JudgeSource {
 public:
  virtual ~JudgeSource() = default;
  /// Scores for every record, nullopt where no conforming score was obtained.
  virtual std::vector<std::optional<int>> score(const std::vector<JudgeRecord>& records) = 0;
};

/// One integer per line, one line per record. Throws IoError, ParseError,
/// LengthMismatch.
class FileJudgeSource : public JudgeSource {
 public:
  explicit FileJudgeSource(std::filesystem::path path) : path_(std::move(path)) {}
  std::vector<std::optional<int>> score(const std::vector<JudgeRecord>& records) override;

 private:
  std::filesystem::path path_;
};

/// POSTs {"question","correct_answer","predicted_answer"} per record.
/// Non-conforming replies are retried; connection failure throws
/// SourceUnreachable.
class HttpJudgeSource : public JudgeSource {
 public:
  explicit HttpJudgeSource(std::string endpoint, int attempts = 3, int timeout_s = 30);
  std::vector<std::optional<int>> score(const std::vector<JudgeRecord>& records) override;

 private:
  std::string base_;
  std::string path_;
  int attempts_;
  int timeout_s_;
};

struct JudgeScoreSet {
  std::vector<int> scores;     // conforming scores only
  std::vector<int> missing;    // record indices with no score
  std::size_t record_count = 0;
};

/// Throws AllRetriesFailed when no record receives a score.
JudgeScoreSet fetch_judge_scores(const std::vector<JudgeRecord>& records, JudgeSource& source);

/// File source when `file` is set, otherwise HTTP to `endpoint` or the
/// JUDGE_ENDPOINT environment variable. Throws ConfigError.
std::unique_ptr<JudgeSource> make_judge_source(const std::optional<std::filesystem::path>& file,
                                               const std::optional<std::string>& endpoint, int attempts = 3,
                                               int timeout_s = 30);

}  // namespace wander
