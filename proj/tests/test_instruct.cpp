#include "doctest.h"
#include "fixtures.hpp"
#include "scenepath/error.hpp"
#include "scenepath/instruct.hpp"
#include "scenepath/speed_profile.hpp"

using namespace scenepath;

namespace {

Scene park() {
  Scene s = fixtures::flat(9, 9);
  int i = 0;
  for (const char* name : {"tree", "lake", "car", "bench", "swing"}) {
    fixtures::add_landmark(s, name, {{0.25 * i, 0.0}});
    ++i;
  }
  return s;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("full instruction") {
  const Scene s = park();
  const Instruction i = parse_instruction("Run from the tree to the lake", s);
  CHECK(i.source == "tree");
  CHECK(i.target == "lake");
  CHECK(i.locomotion.gait == Gait::Run);
}

TEST_CASE("continuation takes the previous target as source") {
  const Scene s = park();
  const Instruction i = parse_instruction("walk crouching to the bench", s, std::string("car"));
  CHECK(i.source == "car");
  CHECK(i.target == "bench");
  CHECK(i.locomotion.gait == Gait::CrouchWalk);
  CHECK(i.locomotion.head_height == doctest::Approx(0.8));
}

TEST_CASE("instruction errors") {
  const Scene s = park();
  CHECK(kind_of([&] { parse_instruction("Fly from the tree to the lake", s); }) == ErrorKind::UnknownVerb);
  CHECK(kind_of([&] { parse_instruction("Run from the tree to the moon", s); }) == ErrorKind::UnknownLandmark);
  CHECK(kind_of([&] { parse_instruction("Run to the lake", s); }) == ErrorKind::MissingSource);
  CHECK(kind_of([&] { parse_instruction("Run the lake", s); }) == ErrorKind::Parse);
}

TEST_CASE("route chaining") {
  const Scene s = park();
  const RouteRequest r = parse_route({"Run to the car", "walk to the swing"}, "tree", s);
  REQUIRE(r.instructions.size() == 2);
  CHECK(r.instructions[0].source == "tree");
  CHECK(r.instructions[0].target == "car");
  CHECK(r.instructions[0].locomotion.gait == Gait::Run);
  CHECK(r.instructions[1].source == "car");
  CHECK(r.instructions[1].target == "swing");
  CHECK(r.instructions[1].locomotion.gait == Gait::Walk);
  CHECK(parse_route({}, "tree", s).instructions.empty());
  CHECK(kind_of([&] { parse_route({"Run from the lake to the car"}, "tree", s); }) == ErrorKind::ChainBreak);
}

TEST_CASE("route files and canonical text round trip") {
  const Scene s = park();
  const RouteRequest r = parse_route_file_text("# demo\nstart: tree\n\nRun to the car\nCrawl to the bench\n", s);
  REQUIRE(r.instructions.size() == 2);
  CHECK(render_instruction(r.instructions[1]) == "Crawl from the car to the bench");
  for (const Instruction& i : r.instructions) CHECK(parse_instruction(render_instruction(i), s) == i);
  CHECK(kind_of([&] { parse_route_file_text("Run to the car\n", s); }) == ErrorKind::Parse);
}

TEST_CASE("locomotion table respects the height envelope") {
  for (Gait g : {Gait::Walk, Gait::Run, Gait::CrouchWalk, Gait::Crawl}) {
    const LocomotionType l = locomotion(g);
    CHECK(l.speed_min <= l.cruise_speed);
    CHECK(l.speed_max <= envelope_vmax(l.head_height) + 1e-12);
  }
  CHECK(locomotion(Gait::Crawl).head_height == doctest::Approx(0.4));
  CHECK(locomotion(Gait::Crawl).speed_max <= 1.0 + 1e-12);
  CHECK(locomotion(Gait::Run).cruise_speed == doctest::Approx(4.0));
}
