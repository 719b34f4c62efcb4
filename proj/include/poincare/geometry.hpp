#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "poincare/types.hpp"

namespace poincare {

struct Disk {
  Point center{0.5, 0.5};
  double radius = 0.25;
};

/// Square of half-width `half_width` whose corners are rounded with radius
/// `corner_radius` (corner_radius <= half_width).
struct SmoothedSquare {
  Point center{0.5, 0.5};
  double half_width = 0.25;
  double corner_radius = 0.05;
};

/// Rank-1 laminate: the inclusion is the strip {0 < y1 < theta}.
struct Laminate {
  double theta = 0.5;
};

/// No inclusion at all. Used as a guard / homogeneous reference.
struct NoInclusion {};

/// Inclusion pattern omega inside the unit cell Y = (0,1)^2.
class CellGeometry {
 public:
  using Shape = std::variant<Disk, SmoothedSquare, Laminate, NoInclusion>;

  CellGeometry() : shape_(NoInclusion{}) {}
  explicit CellGeometry(Shape shape) : shape_(shape) {}

  static CellGeometry disk(Point center, double radius) { return CellGeometry(Disk{center, radius}); }
  static CellGeometry smoothed_square(Point center, double half_width, double corner_radius) {
    return CellGeometry(SmoothedSquare{center, half_width, corner_radius});
  }
  static CellGeometry laminate(double theta) { return CellGeometry(Laminate{theta}); }
  static CellGeometry empty() { return CellGeometry(NoInclusion{}); }

  const Shape& shape() const { return shape_; }
  bool is_laminate() const { return std::holds_alternative<Laminate>(shape_); }
  bool is_empty() const { return std::holds_alternative<NoInclusion>(shape_); }
  bool is_curved() const {
    return std::holds_alternative<Disk>(shape_) || std::holds_alternative<SmoothedSquare>(shape_);
  }

  /// Exact area of omega.
  double theta() const;

  /// Signed distance to the boundary of omega (negative inside).
  double signed_distance(Point y) const;

  /// Closest point of the boundary of omega. Curved shapes only.
  Point project(Point y) const;

  /// Throws GeometryError when the invariants are violated: curved inclusions
  /// must keep a margin of at least kMinMargin to the cell boundary, and a
  /// laminate needs 0 < theta < 1.
  void validate() const;

  static constexpr double kMinMargin = 0.05;

 private:
  Shape shape_;
};

enum class Region : std::uint8_t { Matrix = 0, Inclusion = 1 };

/// Identification of a boundary node with its master image. The slave sits at
/// master + wrap * side.
struct PeriodicPair {
  int slave = 0;
  int master = 0;
  std::array<int, 2> wrap{0, 0};
};

/// P1 triangulation of a square domain (0, side)^2 tiled by
/// cells_per_side^2 copies of one reference cell mesh.
struct TriMesh {
  std::vector<Point> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Region> regions;
  std::vector<PeriodicPair> periodic_pairs;
  std::vector<int> dirichlet_nodes;

  double h = 0.0;          ///< nominal element size in cell units
  double side = 1.0;       ///< domain side length
  int cells_per_side = 1;  ///< tiling factor (N for macro meshes, K for packs)

  /// tile_nodes[t * local_node_count + i] is the global node of local node i
  /// of tile t = ty * cells_per_side + tx. Empty for meshes that were loaded
  /// from disk without tiling information.
  std::vector<int> tile_nodes;
  int local_node_count = 0;
  int local_triangle_count = 0;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
  double cell_size() const { return side / cells_per_side; }
  int tile_node(int tile, int local) const { return tile_nodes[static_cast<size_t>(tile) * local_node_count + local]; }

  double triangle_area(int t) const;
};

enum class BoundaryCondition { Dirichlet, Periodic };

/// Mesh of the unit cell Y with the interface resolved by edges and
/// periodic pairs on all four faces.
TriMesh build_cell_mesh(const CellGeometry& geom, double h);

/// Mesh of the pack KY = (0,K)^2 holding K^2 translated inclusions, with
/// KY-periodic pairs.
TriMesh build_pack_mesh(const CellGeometry& geom, int K, double h);

/// Mesh of Omega = (0,1)^2 tiled by N^2 cells scaled by 1/N. h stays in
/// cell units. Dirichlet: dirichlet_nodes = boundary nodes; Periodic:
/// periodic pairs on the outer boundary.
TriMesh build_macro_mesh(const CellGeometry& geom, int N, double h, BoundaryCondition bc);

/// Tiles a cell mesh K x K times and scales it to side `side`.
TriMesh tile_cell_mesh(const TriMesh& cell, int K, double side, bool keep_periodic);

/// Inclusion area over total area.
double volume_fraction(const TriMesh& mesh);

double inclusion_area(const TriMesh& mesh);
double total_area(const TriMesh& mesh);

/// Connected components of the inclusion triangles (sharing a node). Returns
/// the component index per triangle (-1 for matrix triangles) and the count.
std::pair<std::vector<int>, int> inclusion_components(const TriMesh& mesh);

/// Number of edges separating an inclusion triangle from a matrix triangle,
/// periodic wrap-around included.
int interface_edge_count(const TriMesh& mesh);

/// Node classification by incident regions.
enum class NodeClass : std::uint8_t { Exterior = 0, InteriorInclusion = 1, Interface = 2 };
std::vector<NodeClass> classify_nodes(const TriMesh& mesh);

/// Root master of each node under the periodic identification (identity for
/// non-slave nodes), with the accumulated wrap.
std::vector<PeriodicPair> resolve_masters(const TriMesh& mesh);

}  // namespace poincare
