#include "scenepath/instruct.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

#include "scenepath/error.hpp"
#include "scenepath/speed_profile.hpp"

namespace scenepath {

const char* to_string(Gait g) {
  switch (g) {
    case Gait::Walk: return "walk";
    case Gait::Run: return "run";
    case Gait::CrouchWalk: return "crouch-walk";
    case Gait::Crawl: return "crawl";
  }
  return "walk";
}

LocomotionType locomotion(Gait g, double range_fraction) {
  LocomotionType t;
  t.gait = g;
  switch (g) {
    case Gait::Crawl: t.head_height = 0.4; t.cruise_speed = 1.0; break;
    case Gait::CrouchWalk: t.head_height = 0.8; t.cruise_speed = 2.0; break;
    case Gait::Walk: t.head_height = 1.47; t.cruise_speed = 2.0; break;
    case Gait::Run: t.head_height = 1.47; t.cruise_speed = 4.0; break;
  }
  const double cap = envelope_vmax(t.head_height);
  t.speed_min = std::clamp(t.cruise_speed * (1.0 - range_fraction), 0.0, cap);
  t.speed_max = std::clamp(t.cruise_speed * (1.0 + range_fraction), 0.0, cap);
  return t;
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string squash_spaces(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
    } else {
      if (space) out.push_back(' ');
      space = false;
      out.push_back(c);
    }
  }
  return out;
}

struct VerbAlias {
  const char* text;
  Gait gait;
};

constexpr std::array kVerbs{
    VerbAlias{"walk", Gait::Walk},          VerbAlias{"run", Gait::Run},
    VerbAlias{"sprint", Gait::Run},         VerbAlias{"crawl", Gait::Crawl},
    VerbAlias{"crouch-walk", Gait::CrouchWalk}, VerbAlias{"crouch walk", Gait::CrouchWalk},
    VerbAlias{"walk crouching", Gait::CrouchWalk},
};

const std::string* match_landmark(const Scene& scene, const std::string& wanted) {
  for (const Landmark& l : scene.landmarks) {
    if (lower(l.name) == wanted) return &l.name;
  }
  return nullptr;
}

const std::regex& grammar() {
  static const std::regex re(R"(^\s*(.+?)\s+(?:from\s+the\s+(.+?)\s+)?to\s+the\s+(.+?)\s*[.!]?\s*$)",
                             std::regex::icase | std::regex::ECMAScript);
  return re;
}

}  // namespace

Instruction parse_instruction(std::string_view text, const Scene& scene, std::optional<std::string> previous_target) {
  const std::string input(text);
  std::smatch m;
  if (!std::regex_match(input, m, grammar())) {
    throw Error(ErrorKind::Parse, "instruction", "expected '<verb> [from the <landmark>] to the <landmark>': '" + input + "'");
  }
  const std::string verb = squash_spaces(lower(m[1].str()));
  const auto it = std::ranges::find_if(kVerbs, [&](const VerbAlias& v) { return verb == v.text; });
  if (it == kVerbs.end()) throw Error(ErrorKind::UnknownVerb, "instruction", "unknown verb '" + verb + "'");

  Instruction out;
  out.locomotion = locomotion(it->gait);
  const std::string target = squash_spaces(lower(m[3].str()));
  const std::string* target_name = match_landmark(scene, target);
  if (!target_name) throw Error(ErrorKind::UnknownLandmark, "instruction", "unknown landmark '" + target + "'");
  out.target = *target_name;

  if (m[2].matched) {
    const std::string source = squash_spaces(lower(m[2].str()));
    const std::string* source_name = match_landmark(scene, source);
    if (!source_name) throw Error(ErrorKind::UnknownLandmark, "instruction", "unknown landmark '" + source + "'");
    out.source = *source_name;
  } else {
    if (!previous_target) {
      throw Error(ErrorKind::MissingSource, "instruction", "no source landmark for '" + input + "'");
    }
    out.source = scene.landmark(*previous_target).name;
  }
  if (out.source == out.target) {
    throw Error(ErrorKind::Validation, "instruction", "source and target are both '" + out.source + "'");
  }
  return out;
}

RouteRequest parse_route(const std::vector<std::string>& texts, std::string_view start, const Scene& scene) {
  const Landmark* start_lm = nullptr;
  for (const Landmark& l : scene.landmarks) {
    if (lower(l.name) == lower(start)) start_lm = &l;
  }
  if (!start_lm) throw Error(ErrorKind::UnknownLandmark, "route", "unknown start landmark '" + std::string(start) + "'");
  RouteRequest route;
  std::string previous = start_lm->name;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const std::string where = "instruction " + std::to_string(i);
    Instruction instr;
    try {
      instr = parse_instruction(texts[i], scene, previous);
    } catch (const Error& e) {
      throw Error(e.kind(), where, e.what());
    }
    if (instr.source != previous) {
      throw Error(ErrorKind::ChainBreak, where,
                  "instruction starts at '" + instr.source + "' but the route is at '" + previous + "'");
    }
    previous = instr.target;
    route.instructions.push_back(std::move(instr));
  }
  return route;
}

RouteRequest parse_route_file_text(std::string_view text, const Scene& scene) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::optional<std::string> start;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    const std::string trimmed = squash_spaces(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    if (!start) {
      const std::string low = lower(trimmed);
      if (low.rfind("start:", 0) != 0) throw Error(ErrorKind::Parse, "route file", "first line must be 'start: <landmark>'");
      start = squash_spaces(trimmed.substr(6));
      continue;
    }
    lines.push_back(trimmed);
  }
  if (!start) throw Error(ErrorKind::Parse, "route file", "missing 'start: <landmark>' line");
  return parse_route(lines, *start, scene);
}

RouteRequest load_route_file(const std::string& path, const Scene& scene) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, path, "cannot open route file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_route_file_text(ss.str(), scene);
}

std::string render_instruction(const Instruction& instr) {
  const char* verb = "Walk";
  switch (instr.locomotion.gait) {
    case Gait::Walk: verb = "Walk"; break;
    case Gait::Run: verb = "Run"; break;
    case Gait::CrouchWalk: verb = "Walk crouching"; break;
    case Gait::Crawl: verb = "Crawl"; break;
  }
  return std::string(verb) + " from the " + instr.source + " to the " + instr.target;
}

}  // namespace scenepath
