#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "poincare/geometry.hpp"
#include "poincare/mesh_io.hpp"

using namespace poincare;

namespace {

double min_area(const TriMesh& m) {
  double a = INFINITY;
  for (int t = 0; t < m.triangle_count(); ++t) a = std::min(a, m.triangle_area(t));
  return a;
}

// Every triangle must sit on one side of the interface: its centroid and all
// vertices agree in sign up to the polygonal chord error.
void check_region_tags(const CellGeometry& g, const TriMesh& m) {
  for (int t = 0; t < m.triangle_count(); ++t) {
    Point c{0, 0};
    for (int v : m.triangles[t])
      for (int d = 0; d < 2; ++d) c[d] += m.nodes[v][d] / 3.0;
    const double s = g.signed_distance(c);
    CHECK((s < 0) == (m.regions[t] == Region::Inclusion));
  }
}

}  // namespace

TEST_CASE("laminate cell mesh is exact") {
  const auto g = CellGeometry::laminate(0.5);
  const TriMesh m = build_cell_mesh(g, 0.25);
  CHECK(inclusion_area(m) == doctest::Approx(0.5).epsilon(1e-15));
  for (int t = 0; t < m.triangle_count(); ++t) {
    const bool inside = m.regions[t] == Region::Inclusion;
    for (int v : m.triangles[t]) CHECK((inside ? m.nodes[v][0] <= 0.5 : m.nodes[v][0] >= 0.5));
  }
  CHECK(interface_edge_count(m) > 0);
  CHECK(volume_fraction(build_cell_mesh(CellGeometry::laminate(0.3), 0.1)) == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("disk area and invariants") {
  const auto g = CellGeometry::disk({0.5, 0.5}, 0.25);
  const TriMesh m = build_cell_mesh(g, 1.0 / 32);
  CHECK(std::abs(inclusion_area(m) - kPi / 16) < 2e-3);
  CHECK(total_area(m) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(min_area(m) > 0.0);
  check_region_tags(g, m);
  CHECK(std::abs(volume_fraction(build_cell_mesh(g, 1.0 / 64)) - kPi / 16) < 5e-4);
}

TEST_CASE("disk area error decreases under refinement") {
  const auto g = CellGeometry::disk({0.5, 0.5}, 0.25);
  std::vector<double> err;
  for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64}) err.push_back(std::abs(inclusion_area(build_cell_mesh(g, h)) - kPi / 16));
  for (size_t i = 1; i < err.size(); ++i) CHECK(err[i] < err[i - 1]);
  CHECK(err.front() / err.back() > 8.0);
}

TEST_CASE("geometry validation") {
  CHECK_THROWS_AS(build_cell_mesh(CellGeometry::disk({0.5, 0.5}, 0.48), 0.1), GeometryError);
  CHECK_THROWS_AS(CellGeometry::laminate(1.0).validate(), GeometryError);
  CHECK_THROWS_AS(CellGeometry::laminate(0.0).validate(), GeometryError);
  CHECK_THROWS_AS(CellGeometry::smoothed_square({0.5, 0.5}, 0.2, 0.3).validate(), GeometryError);
  CHECK_NOTHROW(CellGeometry::smoothed_square({0.5, 0.5}, 0.25, 0.05).validate());
  CHECK(volume_fraction(build_cell_mesh(CellGeometry::empty(), 0.25)) == 0.0);
}

TEST_CASE("periodic pairs match opposite faces") {
  for (const auto& g : {CellGeometry::disk({0.5, 0.5}, 0.25), CellGeometry::laminate(0.3),
                        CellGeometry::smoothed_square({0.45, 0.5}, 0.3, 0.1)}) {
    const TriMesh m = build_cell_mesh(g, 1.0 / 16);
    CHECK(!m.periodic_pairs.empty());
    std::map<int, int> seen;
    for (const auto& p : m.periodic_pairs) {
      CHECK(p.slave != p.master);
      CHECK(++seen[p.slave] == 1);
      for (int d = 0; d < 2; ++d) CHECK(std::abs(m.nodes[p.slave][d] - m.nodes[p.master][d] - p.wrap[d] * m.side) < 1e-12);
    }
  }
}

TEST_CASE("random inclusions mesh without inverted triangles") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double r = 0.1 + 0.3 * u(rng);
    const double lo = r + 0.06, hi = 1.0 - r - 0.06;
    const Point c{lo + (hi - lo) * u(rng), lo + (hi - lo) * u(rng)};
    const auto g = CellGeometry::disk(c, r);
    const TriMesh m = build_cell_mesh(g, 1.0 / 24);
    CHECK(min_area(m) > 0.0);
    CHECK(total_area(m) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(inclusion_area(m) - kPi * r * r) < 5e-3);
  }
}

TEST_CASE("pack mesh") {
  const auto disk = CellGeometry::disk({0.5, 0.5}, 0.25);
  const TriMesh cell = build_cell_mesh(disk, 1.0 / 16);
  const TriMesh k1 = build_pack_mesh(disk, 1, 1.0 / 16);
  CHECK(k1.triangles == cell.triangles);
  CHECK(k1.node_count() == cell.node_count());

  const TriMesh k2 = build_pack_mesh(disk, 2, 1.0 / 16);
  CHECK(inclusion_components(k2).second == 4);
  CHECK(inclusion_area(k2) == doctest::Approx(4 * inclusion_area(cell)).epsilon(1e-12));
  CHECK(total_area(k2) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(inclusion_area(build_pack_mesh(CellGeometry::laminate(0.5), 2, 0.125)) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("macro mesh") {
  const auto disk = CellGeometry::disk({0.5, 0.5}, 0.25);
  const TriMesh p1 = build_macro_mesh(disk, 1, 1.0 / 16, BoundaryCondition::Periodic);
  CHECK(p1.triangles == build_cell_mesh(disk, 1.0 / 16).triangles);

  const TriMesh d3 = build_macro_mesh(disk, 3, 1.0 / 8, BoundaryCondition::Dirichlet);
  CHECK(inclusion_components(d3).second == 9);
  CHECK(d3.periodic_pairs.empty());
  for (int v : d3.dirichlet_nodes) {
    const Point x = d3.nodes[v];
    CHECK(std::min({x[0], x[1], 1 - x[0], 1 - x[1]}) < 1e-14);
  }
  std::vector<bool> boundary(d3.node_count(), false);
  for (int v : d3.dirichlet_nodes) boundary[v] = true;
  for (int t = 0; t < d3.triangle_count(); ++t)
    if (d3.regions[t] == Region::Inclusion)
      for (int v : d3.triangles[t]) CHECK(!boundary[v]);
  CHECK(total_area(d3) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(inclusion_area(build_macro_mesh(CellGeometry::laminate(0.5), 2, 0.125, BoundaryCondition::Periodic)) ==
        doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("node classification") {
  const TriMesh m = build_cell_mesh(CellGeometry::disk({0.5, 0.5}, 0.25), 1.0 / 16);
  const auto cls = classify_nodes(m);
  int interior = 0, interface = 0;
  for (auto c : cls) {
    interior += c == NodeClass::InteriorInclusion;
    interface += c == NodeClass::Interface;
  }
  CHECK(interior > 0);
  CHECK(interface > 0);
}

TEST_CASE("mesh json round trip") {
  const TriMesh m = build_macro_mesh(CellGeometry::disk({0.5, 0.5}, 0.2), 2, 0.125, BoundaryCondition::Periodic);
  const TriMesh r = mesh_from_json(mesh_to_json(m));
  CHECK(r.triangles == m.triangles);
  CHECK(r.regions == m.regions);
  CHECK(r.periodic_pairs.size() == m.periodic_pairs.size());
  CHECK(r.cells_per_side == 2);
  for (int i = 0; i < m.node_count(); ++i) {
    CHECK(r.nodes[i][0] == m.nodes[i][0]);
    CHECK(r.nodes[i][1] == m.nodes[i][1]);
  }
  CHECK_THROWS_AS(mesh_from_json(nlohmann::json{{"nodes", 3}}), ConfigError);
}
