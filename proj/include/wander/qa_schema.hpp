#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace wander {

enum class Perspective { robot, human };
enum class Phase { start, path, end };

std::string to_string(Perspective p);
std::string to_string(Phase p);
std::optional<Perspective> perspective_from_string(const std::string& s);
std::optional<Phase> phase_from_string(const std::string& s);

struct QaType {
  std::string name;
  Phase phase;
  std::optional<Perspective> only;  // set for perspective-specific types
  std::vector<std::string> aliases;
};

const std::vector<QaType>& qa_types();
/// Canonical type for a name or alias.
const QaType* find_qa_type(const std::string& name);

inline constexpr int kQaPerSituation = 10;
inline constexpr int kQaMaxWords = 30;

struct QARecord {
  std::string phase;
  std::string type;
  std::string question;
  std::string answer;
};

struct SituationSet {
  std::string situation;
  std::optional<Perspective> perspective;
  std::vector<QARecord> qa;
};

struct Violation {
  int set = 0;
  int record = -1;  // -1 for set-level problems
  std::string field;
  std::string rule;
  std::string message;
};

std::string format_violation(const Violation& v);

/// Whitespace-separated tokens.
int word_count(const std::string& text);

/// Accepts a JSON array of situation objects, a single object, or one object
/// per line. Throws ParseError when nothing parses.
std::vector<Violation> validate_qa_text(const std::string& text,
                                        std::optional<Perspective> default_perspective = std::nullopt);
std::vector<Violation> validate_qa_file(const std::filesystem::path& path,
                                        std::optional<Perspective> default_perspective = std::nullopt);

std::vector<SituationSet> parse_qa_text(const std::string& text);
std::string write_qa_text(const std::vector<SituationSet>& sets);

/// Perspective from the set, else the default, else inferred from the
/// perspective-specific type it contains.
std::optional<Perspective> effective_perspective(const SituationSet& set, std::optional<Perspective> fallback);

}  // namespace wander
