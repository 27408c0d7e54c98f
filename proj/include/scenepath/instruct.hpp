#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scenepath/scene.hpp"

namespace scenepath {

enum class Gait { Walk, Run, CrouchWalk, Crawl };

const char* to_string(Gait g);

/// Target head height and nominal speed for one way of moving.
struct LocomotionType {
  Gait gait = Gait::Walk;
  double head_height = 1.47;
  double cruise_speed = 2.0;
  double speed_min = 1.0;
  double speed_max = 3.0;

  const char* name() const { return to_string(gait); }
  bool operator==(const LocomotionType&) const = default;
};

/// Canonical parameters: crawl 0.4 m / 1 m/s, crouch-walk 0.8 m / 2 m/s,
/// walk 1.47 m / 2 m/s, run 1.47 m / 4 m/s. The speed range is
/// `range_fraction` around cruise, clipped to the height envelope.
LocomotionType locomotion(Gait g, double range_fraction = 0.5);

struct Instruction {
  std::string source;
  std::string target;
  LocomotionType locomotion;
  bool operator==(const Instruction&) const = default;
};

struct RouteRequest {
  std::vector<Instruction> instructions;
  bool operator==(const RouteRequest&) const = default;
};

/// Parses `<verb> from the <landmark> to the <landmark>` or the continuation
/// form `<verb> to the <landmark>` (then `previous_target` supplies the source).
/// Matching is case-insensitive; landmark names are returned as stored in the scene.
Instruction parse_instruction(std::string_view text, const Scene& scene,
                              std::optional<std::string> previous_target = std::nullopt);

RouteRequest parse_route(const std::vector<std::string>& texts, std::string_view start, const Scene& scene);

/// Route file: first non-comment line `start: <landmark>`, then one instruction per line.
RouteRequest parse_route_file_text(std::string_view text, const Scene& scene);
RouteRequest load_route_file(const std::string& path, const Scene& scene);

/// Canonical text, e.g. "Walk crouching from the car to the bench".
std::string render_instruction(const Instruction& instr);

}  // namespace scenepath
