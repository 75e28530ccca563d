#include "wander/qa_schema.hpp"

#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wander/errors.hpp"
#include "wander/io.hpp"

namespace wander {

using json = nlohmann::ordered_json;

std::string to_string(Perspective p) { return p == Perspective::robot ? "robot" : "human"; }

std::string to_string(Phase p) {
  switch (p) {
    case Phase::start: return "start";
    case Phase::path: return "path";
    case Phase::end: return "end";
  }
  return "?";
}

std::optional<Perspective> perspective_from_string(const std::string& s) {
  if (s == "robot") return Perspective::robot;
  if (s == "human") return Perspective::human;
  return std::nullopt;
}

std::optional<Phase> phase_from_string(const std::string& s) {
  if (s == "start") return Phase::start;
  if (s == "path") return Phase::path;
  if (s == "end") return Phase::end;
  return std::nullopt;
}

const std::vector<QaType>& qa_types() {
  static const std::vector<QaType> types{
      {"Object Awareness", Phase::start, std::nullopt, {}},
      {"Navigability Reasoning", Phase::start, std::nullopt, {}},
      {"Egocentric Direction", Phase::start, std::nullopt, {"Ego-Target Orientation"}},
      {"Landmark Sequencing", Phase::path, std::nullopt, {}},
      {"Spatial Estimation", Phase::path, std::nullopt, {}},
      {"Obstacle Reasoning", Phase::path, std::nullopt, {}},
      {"Route Planning", Phase::path, Perspective::robot, {}},
      {"Relative Distance Change", Phase::path, Perspective::human, {}},
      {"Object Proximity", Phase::end, std::nullopt, {}},
      {"Affordance", Phase::end, std::nullopt, {}},
      {"Egocentric Spatial Relation", Phase::end, std::nullopt, {"Egocentric Spatial Relationship"}},
  };
  return types;
}

const QaType* find_qa_type(const std::string& name) {
  for (const auto& t : qa_types()) {
    if (t.name == name) return &t;
    for (const auto& a : t.aliases) {
      if (a == name) return &t;
    }
  }
  return nullptr;
}

std::string format_violation(const Violation& v) {
  std::ostringstream out;
  out << "set " << v.set;
  if (v.record >= 0) out << " record " << v.record;
  out << " field " << v.field << ": " << v.rule << " (" << v.message << ")";
  return out.str();
}

int word_count(const std::string& text) {
  std::istringstream in(text);
  std::string w;
  int n = 0;
  while (in >> w) ++n;
  return n;
}

namespace {

std::vector<json> parse_documents(const std::string& text) {
  try {
    json doc = json::parse(text);
    if (doc.is_array()) return std::vector<json>(doc.begin(), doc.end());
    return {doc};
  } catch (const json::exception&) {
  }
  // One object per line.
  std::vector<json> docs;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      docs.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw ParseError("QA file line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (docs.empty()) throw ParseError("QA file is empty");
  return docs;
}

std::optional<Perspective> inferred_perspective(const std::vector<std::string>& types) {
  for (const auto& name : types) {
    if (const QaType* t = find_qa_type(name); t && t->only) return t->only;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Perspective> effective_perspective(const SituationSet& set, std::optional<Perspective> fallback) {
  if (set.perspective) return set.perspective;
  if (fallback) return fallback;
  std::vector<std::string> types;
  for (const auto& r : set.qa) types.push_back(r.type);
  return inferred_perspective(types);
}

std::vector<Violation> validate_qa_text(const std::string& text, std::optional<Perspective> default_perspective) {
  const std::vector<json> docs = parse_documents(text);
  std::vector<Violation> out;
  for (std::size_t si = 0; si < docs.size(); ++si) {
    const int set = static_cast<int>(si);
    const json& doc = docs[si];
    auto add = [&](int record, const std::string& field, const std::string& rule, const std::string& msg) {
      out.push_back({set, record, field, rule, msg});
    };
    if (!doc.is_object()) {
      add(-1, "situation", "missing-field", "situation set must be an object");
      continue;
    }
    if (!doc.contains("situation") || !doc["situation"].is_string()) {
      add(-1, "situation", "missing-field", "situation text is required");
    }
    std::optional<Perspective> perspective = default_perspective;
    if (doc.contains("perspective")) {
      const auto p = doc["perspective"].is_string() ? perspective_from_string(doc["perspective"].get<std::string>())
                                                    : std::nullopt;
      if (!p) {
        add(-1, "perspective", "perspective-value", "perspective must be robot or human");
      } else {
        perspective = p;
      }
    }
    if (!doc.contains("qa") || !doc["qa"].is_array()) {
      add(-1, "qa", "missing-field", "qa list is required");
      continue;
    }
    const json& qa = doc["qa"];
    if (qa.size() != static_cast<std::size_t>(kQaPerSituation)) {
      add(-1, "qa", "record-count", "expected 10 records, found " + std::to_string(qa.size()));
    }

    std::map<std::string, int> phase_count{{"start", 0}, {"path", 0}, {"end", 0}};
    std::map<std::string, int> first_seen;
    std::vector<std::string> type_names;
    for (std::size_t ri = 0; ri < qa.size(); ++ri) {
      const int rec = static_cast<int>(ri);
      const json& r = qa[ri];
      auto field = [&](const char* name) -> std::optional<std::string> {
        if (!r.is_object() || !r.contains(name) || !r[name].is_string()) {
          add(rec, name, "missing-field", std::string(name) + " must be a string");
          return std::nullopt;
        }
        return r[name].get<std::string>();
      };
      const auto phase = field("phase");
      const auto type = field("type");
      const auto question = field("question");
      const auto answer = field("answer");
      if (phase) {
        if (!phase_from_string(*phase)) {
          add(rec, "phase", "phase-value", "unknown phase '" + *phase + "'");
        } else {
          ++phase_count[*phase];
        }
      }
      if (type) {
        const QaType* t = find_qa_type(*type);
        if (!t) {
          add(rec, "type", "type-unknown", "unknown type '" + *type + "'");
        } else {
          type_names.push_back(t->name);
          if (auto it = first_seen.find(t->name); it != first_seen.end()) {
            add(rec, "type", "type-duplicate", t->name + " already used by record " + std::to_string(it->second));
          } else {
            first_seen[t->name] = rec;
          }
          if (phase && phase_from_string(*phase) && *phase_from_string(*phase) != t->phase) {
            add(rec, "type", "type-phase", t->name + " belongs to the " + to_string(t->phase) + " phase");
          }
        }
      }
      if (question && word_count(*question) > kQaMaxWords) {
        add(rec, "question", "question-words", std::to_string(word_count(*question)) + " words");
      }
      if (answer && word_count(*answer) > kQaMaxWords) {
        add(rec, "answer", "answer-words", std::to_string(word_count(*answer)) + " words");
      }
    }
    if (phase_count["start"] != 3 || phase_count["path"] != 4 || phase_count["end"] != 3) {
      add(-1, "phase", "phase-split",
          "expected start/path/end = 3/4/3, found " + std::to_string(phase_count["start"]) + "/" +
              std::to_string(phase_count["path"]) + "/" + std::to_string(phase_count["end"]));
    }
    if (!perspective) perspective = inferred_perspective(type_names);
    if (perspective) {
      for (std::size_t ri = 0; ri < qa.size(); ++ri) {
        const json& r = qa[ri];
        if (!r.is_object() || !r.contains("type") || !r["type"].is_string()) continue;
        const QaType* t = find_qa_type(r["type"].get<std::string>());
        if (t && t->only && *t->only != *perspective) {
          add(static_cast<int>(ri), "type", "type-perspective",
              t->name + " is not asked from the " + to_string(*perspective) + " perspective");
        }
      }
    }
  }
  return out;
}

std::vector<Violation> validate_qa_file(const std::filesystem::path& path, std::optional<Perspective> default_perspective) {
  return validate_qa_text(read_text_file(path), default_perspective);
}

std::vector<SituationSet> parse_qa_text(const std::string& text) {
  std::vector<SituationSet> sets;
  try {
    for (const json& doc : parse_documents(text)) {
      SituationSet s;
      s.situation = doc.at("situation").get<std::string>();
      if (doc.contains("perspective")) {
        s.perspective = perspective_from_string(doc["perspective"].get<std::string>());
        if (!s.perspective) throw ParseError("bad perspective");
      }
      for (const json& r : doc.at("qa")) {
        s.qa.push_back({r.at("phase").get<std::string>(), r.at("type").get<std::string>(),
                        r.at("question").get<std::string>(), r.at("answer").get<std::string>()});
      }
      sets.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("QA file: ") + e.what());
  }
  return sets;
}

std::string write_qa_text(const std::vector<SituationSet>& sets) {
  json doc = json::array();
  for (const auto& s : sets) {
    json j;
    j["situation"] = s.situation;
    if (s.perspective) j["perspective"] = to_string(*s.perspective);
    json qa = json::array();
    for (const auto& r : s.qa) {
      qa.push_back({{"phase", r.phase}, {"question", r.question}, {"answer", r.answer}, {"type", r.type}});
    }
    j["qa"] = std::move(qa);
    doc.push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

}  // namespace wander
