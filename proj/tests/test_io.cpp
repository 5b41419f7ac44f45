#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "slipflow/errors.hpp"
#include "slipflow/io.hpp"

using namespace slipflow;

namespace {

struct Vtk {
  std::vector<Vec2> points;
  std::vector<std::vector<int>> cells;
  std::vector<int> types;
  std::vector<std::string> arrays;
};

Vtk parse_vtk(const std::string& text) {
  Vtk v;
  std::istringstream in(text);
  std::string word;
  while (in >> word) {
    if (word == "POINTS") {
      int n;
      in >> n >> word;
      for (int i = 0; i < n; ++i) {
        double x, y, z;
        in >> x >> y >> z;
        v.points.emplace_back(x, y);
      }
    } else if (word == "CELLS") {
      int n, total;
      in >> n >> total;
      for (int c = 0; c < n; ++c) {
        int k;
        in >> k;
        std::vector<int> ids(k);
        for (int& id : ids) in >> id;
        v.cells.push_back(ids);
      }
    } else if (word == "CELL_TYPES") {
      int n;
      in >> n;
      v.types.resize(n);
      for (int& t : v.types) in >> t;
    } else if (word == "VECTORS" || word == "SCALARS") {
      in >> word;
      v.arrays.push_back(word);
    }
  }
  return v;
}

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

TEST_CASE("vtk biquadratic quads are ordered corners, edges, center") {
  const Mesh mesh = build_rectangle_mesh(0.0, 2.0, 0.0, 1.0, 2, 1);
  const Space space(mesh, SpaceFamily::MixedQ2Q1);
  Field u(space);
  u.name = "u";
  for (int i = 0; i < space.num_nodes(); ++i) set_nodal_velocity(u, i, mesh.nodes()[i]);
  const Vtk v = parse_vtk(vtk_text({{&u, true, true}}));

  REQUIRE(v.points.size() == mesh.num_nodes());
  REQUIRE(v.cells.size() == 2);
  CHECK(v.types == std::vector<int>{28, 28});
  for (const auto& cell : v.cells) {
    REQUIRE(cell.size() == 9);
    Vec2 corner[4];
    for (int k = 0; k < 4; ++k) corner[k] = v.points[cell[k]];
    // Corners counter-clockwise around a unit square.
    for (int k = 0; k < 4; ++k) {
      const Vec2 e = corner[(k + 1) % 4] - corner[k];
      CHECK(e.norm() == doctest::Approx(1.0));
      CHECK(cross(e, corner[(k + 2) % 4] - corner[(k + 1) % 4]) > 0.0);
    }
    // Edge k joins corners k and k+1.
    for (int k = 0; k < 4; ++k) {
      const Vec2 mid = 0.5 * (corner[k] + corner[(k + 1) % 4]);
      CHECK((v.points[cell[4 + k]] - mid).norm() < 1e-14);
    }
    const Vec2 center = 0.25 * (corner[0] + corner[1] + corner[2] + corner[3]);
    CHECK((v.points[cell[8]] - center).norm() < 1e-14);
  }
  CHECK(v.arrays == std::vector<std::string>{"u", "u"});
}

TEST_CASE("vtk quadratic edges in 1d") {
  DomainSpec section{IntervalDomain{1.0}, 1.0};
  const Mesh mesh = build_cross_section_mesh(section, 3);
  const Space space(mesh, SpaceFamily::ScalarQ2);
  Field g(space);
  const Vtk v = parse_vtk(vtk_text({{&g}}));
  REQUIRE(v.cells.size() == 3);
  for (const auto& cell : v.cells) {
    REQUIRE(cell.size() == 3);
    CHECK(v.points[cell[2]].x() == doctest::Approx(0.5 * (v.points[cell[0]].x() + v.points[cell[1]].x())));
  }
  CHECK(v.types == std::vector<int>{21, 21, 21});
  CHECK(v.arrays == std::vector<std::string>{"scalar"});
}

TEST_CASE("vtk entries select the parts of a mixed field") {
  const Mesh mesh = build_rectangle_mesh(0.0, 1.0, 0.0, 1.0, 1, 1);
  const Space space(mesh, SpaceFamily::MixedQ2Q1);
  Field a(space), p(space);
  a.name = "a";
  p.name = "p";
  const Vtk v = parse_vtk(vtk_text({{&a, true, false}, {&p, false, true}}));
  CHECK(v.arrays == std::vector<std::string>{"a", "p"});
  const Mesh other = build_rectangle_mesh(0.0, 1.0, 0.0, 1.0, 1, 1);
  const Space elsewhere(other, SpaceFamily::MixedQ2Q1);
  Field b(elsewhere);
  CHECK_THROWS_AS(vtk_text({{&a}, {&b}}), ContractViolation);
  CHECK_THROWS_AS(vtk_text({}), ContractViolation);
}

TEST_CASE("csv keeps full precision") {
  const std::string text = csv_text({"x", "y"}, {{0.1, 1.0 / 3.0}, {-2.0, 1e-300}});
  std::istringstream in(text);
  std::string header, row;
  std::getline(in, header);
  CHECK(header == "x,y");
  std::getline(in, row);
  const auto comma = row.find(',');
  CHECK(std::stod(row.substr(0, comma)) == 0.1);
  CHECK(std::stod(row.substr(comma + 1)) == 1.0 / 3.0);
  CHECK_THROWS_AS(csv_text({"x"}, {{1.0, 2.0}}), ContractViolation);
}

TEST_CASE("check json") {
  Check c = make_check("runtime", 0.25, "<=", 1.0, "wall clock", {{"n", 3.0}, {"bad", std::nan("")}});
  nlohmann::json j = to_json(c);
  CHECK(j["value"] == 0.25);
  CHECK(j["passed"] == true);
  CHECK(j["details"]["n"] == 3.0);
  CHECK(j["details"]["bad"].is_null());
  c.timing = true;
  CHECK(to_json(c)["value"].is_null());
  CHECK(to_json(c)["passed"] == true);
}

TEST_CASE("report json is a pure function of its content") {
  Report r;
  r.environment = {{"program", "slipflow"}};
  r.checks.push_back(make_check("a", 1e-12, "<=", 1e-10, "x"));
  r.checks.push_back(make_check("b", 2.0, ">=", 3.0, "y"));
  const std::string once = to_json(r).dump(2);
  CHECK(once == to_json(r).dump(2));
  CHECK(to_json(r)["passed"] == false);
}
