#include "poincare/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace poincare {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double norm2(Point p) { return std::hypot(p[0], p[1]); }

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

std::vector<double> uniform_lines(double a, double b, double h) {
  const double len = b - a;
  const int n = std::max(1, static_cast<int>(std::ceil(len / h - 1e-9)));
  std::vector<double> lines(n + 1);
  for (int i = 0; i <= n; ++i) lines[i] = a + len * static_cast<double>(i) / n;
  lines[n] = b;
  return lines;
}

int sign_of(double v) { return v < 0.0 ? -1 : (v > 0.0 ? 1 : 0); }

}  // namespace

// ---------------------------------------------------------------------------
// CellGeometry

double CellGeometry::theta() const {
  return std::visit(Overloaded{
                        [](const Disk& d) { return kPi * d.radius * d.radius; },
                        [](const SmoothedSquare& s) {
                          const double side = 2.0 * s.half_width;
                          return side * side - (4.0 - kPi) * s.corner_radius * s.corner_radius;
                        },
                        [](const Laminate& l) { return l.theta; },
                        [](const NoInclusion&) { return 0.0; },
                    },
                    shape_);
}

double CellGeometry::signed_distance(Point y) const {
  return std::visit(
      Overloaded{
          [&](const Disk& d) { return norm2({y[0] - d.center[0], y[1] - d.center[1]}) - d.radius; },
          [&](const SmoothedSquare& s) {
            const double inner = s.half_width - s.corner_radius;
            const double qx = std::abs(y[0] - s.center[0]) - inner;
            const double qy = std::abs(y[1] - s.center[1]) - inner;
            const double outside = norm2({std::max(qx, 0.0), std::max(qy, 0.0)});
            const double inside = std::min(std::max(qx, qy), 0.0);
            return outside + inside - s.corner_radius;
          },
          [&](const Laminate& l) { return std::max(-y[0], y[0] - l.theta); },
          [](const NoInclusion&) { return std::numeric_limits<double>::infinity(); },
      },
      shape_);
}

Point CellGeometry::project(Point y) const {
  return std::visit(
      Overloaded{
          [&](const Disk& d) -> Point {
            const double dx = y[0] - d.center[0];
            const double dy = y[1] - d.center[1];
            const double r = std::hypot(dx, dy);
            if (r == 0.0) return {d.center[0] + d.radius, d.center[1]};
            return {d.center[0] + d.radius * dx / r, d.center[1] + d.radius * dy / r};
          },
          [&](const SmoothedSquare& s) -> Point {
            const double inner = s.half_width - s.corner_radius;
            const double px = y[0] - s.center[0];
            const double py = y[1] - s.center[1];
            const double sx = px < 0.0 ? -1.0 : 1.0;
            const double sy = py < 0.0 ? -1.0 : 1.0;
            const double qx = std::abs(px) - inner;
            const double qy = std::abs(py) - inner;
            if (qx > 0.0 && qy > 0.0) {
              const double cx = sx * inner;
              const double cy = sy * inner;
              const double r = std::hypot(px - cx, py - cy);
              return {s.center[0] + cx + s.corner_radius * (px - cx) / r,
                      s.center[1] + cy + s.corner_radius * (py - cy) / r};
            }
            if (qx >= qy) return {s.center[0] + sx * s.half_width, y[1]};
            return {y[0], s.center[1] + sy * s.half_width};
          },
          [&](const Laminate&) -> Point { throw GeometryError("project: laminate boundary is not curved"); },
          [&](const NoInclusion&) -> Point { throw GeometryError("project: empty geometry has no boundary"); },
      },
      shape_);
}

void CellGeometry::validate() const {
  auto margin_check = [](Point c, double half) {
    const double margin = std::min({c[0] - half, 1.0 - c[0] - half, c[1] - half, 1.0 - c[1] - half});
    if (margin < kMinMargin - 1e-12) {
      std::ostringstream os;
      os << "inclusion margin " << margin << " to the cell boundary is below " << kMinMargin;
      throw GeometryError(os.str());
    }
  };
  std::visit(Overloaded{
                 [&](const Disk& d) {
                   if (!(d.radius > 0.0)) throw GeometryError("disk radius must be positive");
                   margin_check(d.center, d.radius);
                 },
                 [&](const SmoothedSquare& s) {
                   if (!(s.half_width > 0.0)) throw GeometryError("square half-width must be positive");
                   if (s.corner_radius < 0.0 || s.corner_radius > s.half_width)
                     throw GeometryError("corner radius must lie in [0, half_width]");
                   margin_check(s.center, s.half_width);
                 },
                 [&](const Laminate& l) {
                   if (!(l.theta > 0.0 && l.theta < 1.0)) throw GeometryError("laminate theta must lie in (0,1)");
                 },
                 [](const NoInclusion&) {},
             },
             shape_);
}

// ---------------------------------------------------------------------------
// TriMesh helpers

double TriMesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  return signed_area(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]);
}

double inclusion_area(const TriMesh& mesh) {
  double a = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t)
    if (mesh.regions[t] == Region::Inclusion) a += mesh.triangle_area(t);
  return a;
}

double total_area(const TriMesh& mesh) {
  double a = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) a += mesh.triangle_area(t);
  return a;
}

double volume_fraction(const TriMesh& mesh) {
  const double total = total_area(mesh);
  if (total <= 0.0) return 0.0;
  return inclusion_area(mesh) / total;
}

std::vector<PeriodicPair> resolve_masters(const TriMesh& mesh) {
  const int n = mesh.node_count();
  std::vector<PeriodicPair> direct(n);
  for (int i = 0; i < n; ++i) direct[i] = {i, i, {0, 0}};
  for (const auto& p : mesh.periodic_pairs) direct[p.slave] = p;
  std::vector<PeriodicPair> root(n);
  for (int i = 0; i < n; ++i) {
    PeriodicPair r{i, i, {0, 0}};
    int cur = i;
    for (int guard = 0; direct[cur].master != cur; ++guard) {
      if (guard > n) throw GeometryError("periodic pairs contain a cycle");
      r.wrap[0] += direct[cur].wrap[0];
      r.wrap[1] += direct[cur].wrap[1];
      cur = direct[cur].master;
    }
    r.master = cur;
    root[i] = r;
  }
  return root;
}

std::vector<NodeClass> classify_nodes(const TriMesh& mesh) {
  std::vector<std::uint8_t> seen(mesh.node_count(), 0);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const std::uint8_t bit = mesh.regions[t] == Region::Inclusion ? 2 : 1;
    for (int v : mesh.triangles[t]) seen[v] |= bit;
  }
  std::vector<NodeClass> cls(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) {
    switch (seen[i]) {
      case 2: cls[i] = NodeClass::InteriorInclusion; break;
      case 3: cls[i] = NodeClass::Interface; break;
      default: cls[i] = NodeClass::Exterior; break;
    }
  }
  return cls;
}

std::pair<std::vector<int>, int> inclusion_components(const TriMesh& mesh) {
  const auto roots = resolve_masters(mesh);
  std::vector<int> parent(mesh.node_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    if (mesh.regions[t] != Region::Inclusion) continue;
    const auto& tri = mesh.triangles[t];
    const int a = find(roots[tri[0]].master);
    for (int k = 1; k < 3; ++k) {
      const int b = find(roots[tri[k]].master);
      if (a != b) parent[b] = a;
    }
  }
  std::vector<int> label(mesh.node_count(), -1);
  std::vector<int> comp(mesh.triangle_count(), -1);
  int count = 0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    if (mesh.regions[t] != Region::Inclusion) continue;
    const int r = find(roots[mesh.triangles[t][0]].master);
    if (label[r] < 0) label[r] = count++;
    comp[t] = label[r];
  }
  return {comp, count};
}

int interface_edge_count(const TriMesh& mesh) {
  const auto roots = resolve_masters(mesh);
  std::map<std::pair<int, int>, std::uint8_t> edges;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const std::uint8_t bit = mesh.regions[t] == Region::Inclusion ? 2 : 1;
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      int a = roots[tri[k]].master;
      int b = roots[tri[(k + 1) % 3]].master;
      if (a > b) std::swap(a, b);
      edges[{a, b}] |= bit;
    }
  }
  int count = 0;
  for (const auto& [key, bits] : edges)
    if (bits == 3) ++count;
  return count;
}

// ---------------------------------------------------------------------------
// Cell mesh

namespace {

/// Snaps near-interface interior nodes onto the boundary of omega, then cuts
/// every triangle that still straddles the interface along the
/// grid-intersection points. Afterwards no triangle has vertices strictly on
/// both sides.
void conform_to_interface(const CellGeometry& geom, double hmin, int boundary_node_limit,
                          const std::vector<bool>& on_cell_boundary, std::vector<Point>& nodes,
                          std::vector<std::array<int, 3>>& tris, std::vector<int>& sign) {
  const int n0 = static_cast<int>(nodes.size());
  sign.assign(n0, 0);
  const double snap = 0.2 * hmin;
  for (int i = 0; i < n0; ++i) {
    double phi = geom.signed_distance(nodes[i]);
    if (i < boundary_node_limit && !on_cell_boundary[i] && std::abs(phi) < snap) {
      nodes[i] = geom.project(nodes[i]);
      phi = 0.0;
    }
    sign[i] = sign_of(phi);
  }
  // Deformed grid: on each edge crossing the interface, move the endpoint
  // closer to it onto the boundary when no incident triangle degenerates.
  // Edges left crossing are cut below.
  std::vector<std::vector<int>> incident(n0);
  for (int t = 0; t < static_cast<int>(tris.size()); ++t)
    for (int v : tris[t]) incident[v].push_back(t);
  std::vector<double> phis(n0);
  for (int i = 0; i < n0; ++i) phis[i] = sign[i] == 0 ? 0.0 : geom.signed_distance(nodes[i]);
  const double min_area = 0.02 * hmin * hmin;
  auto try_move = [&](int v) {
    if (on_cell_boundary[v] || v >= boundary_node_limit) return false;
    const Point old = nodes[v];
    nodes[v] = geom.project(old);
    for (int t : incident[v]) {
      const auto& tri = tris[t];
      const Point& p0 = nodes[tri[0]];
      const Point& p1 = nodes[tri[1]];
      const Point& p2 = nodes[tri[2]];
      const double area = 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
      if (area < min_area) {
        nodes[v] = old;
        return false;
      }
    }
    phis[v] = 0.0;
    sign[v] = 0;
    return true;
  };
  for (const auto& tri : tris)
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k], b = tri[(k + 1) % 3];
      if (sign[a] * sign[b] >= 0) continue;
      const bool a_first = std::abs(phis[a]) <= std::abs(phis[b]);
      if (!try_move(a_first ? a : b)) try_move(a_first ? b : a);
    }

  std::map<std::pair<int, int>, int> cut_nodes;
  auto cut = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    if (auto it = cut_nodes.find(key); it != cut_nodes.end()) return it->second;
    // Bisection on the straight edge; the endpoints have opposite signs.
    Point lo = nodes[key.first];
    Point hi = nodes[key.second];
    const bool lo_inside = geom.signed_distance(lo) < 0.0;
    for (int it = 0; it < 80; ++it) {
      const Point mid{0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])};
      const bool inside = geom.signed_distance(mid) < 0.0;
      if (inside == lo_inside)
        lo = mid;
      else
        hi = mid;
    }
    const Point p = geom.project({0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])});
    const int id = static_cast<int>(nodes.size());
    nodes.push_back(p);
    sign.push_back(0);
    cut_nodes.emplace(key, id);
    return id;
  };

  auto len2 = [&](int a, int b) {
    const double dx = nodes[a][0] - nodes[b][0];
    const double dy = nodes[a][1] - nodes[b][1];
    return dx * dx + dy * dy;
  };
  auto diag_key = [&](int a, int b) { return std::min(nodes[a][0] + nodes[a][1], nodes[b][0] + nodes[b][1]); };

  std::vector<std::array<int, 3>> out;
  out.reserve(tris.size() + tris.size() / 4);
  for (const auto& tri : tris) {
    const int s0 = sign[tri[0]], s1 = sign[tri[1]], s2 = sign[tri[2]];
    const bool straddles = (s0 * s1 < 0) || (s1 * s2 < 0) || (s0 * s2 < 0);
    if (!straddles) {
      out.push_back(tri);
      continue;
    }
    // Rotate so the special vertex comes first while keeping orientation.
    std::array<int, 3> r = tri;
    auto rotate_until = [&](auto pred) {
      for (int k = 0; k < 3; ++k) {
        if (pred(r)) return;
        r = {r[1], r[2], r[0]};
      }
    };
    const int zeros = (s0 == 0) + (s1 == 0) + (s2 == 0);
    if (zeros == 1) {
      rotate_until([&](const auto& q) { return sign[q[0]] == 0; });
      const int p = cut(r[1], r[2]);
      out.push_back({r[0], r[1], p});
      out.push_back({r[0], p, r[2]});
    } else {
      // The lone vertex has the sign not shared by the other two.
      rotate_until([&](const auto& q) { return sign[q[1]] == sign[q[2]]; });
      const int a = r[0], b = r[1], c = r[2];
      const int p = cut(a, b);
      const int q = cut(a, c);
      out.push_back({a, p, q});
      const double dpc = len2(p, c), dbq = len2(b, q);
      bool use_pc = dpc < dbq;
      if (std::abs(dpc - dbq) <= 1e-14 * std::max(dpc, dbq)) use_pc = diag_key(p, c) <= diag_key(b, q);
      if (use_pc) {
        out.push_back({p, b, c});
        out.push_back({p, c, q});
      } else {
        out.push_back({p, b, q});
        out.push_back({b, c, q});
      }
    }
  }
  tris = std::move(out);
}

}  // namespace

TriMesh build_cell_mesh(const CellGeometry& geom, double h) {
  if (!(h > 0.0 && h <= 0.5)) throw GeometryError("mesh size h must lie in (0, 0.5]");
  geom.validate();

  std::vector<double> xs, ys;
  if (const auto* lam = std::get_if<Laminate>(&geom.shape())) {
    xs = uniform_lines(0.0, lam->theta, h);
    const auto right = uniform_lines(lam->theta, 1.0, h);
    xs.insert(xs.end(), right.begin() + 1, right.end());
  } else {
    xs = uniform_lines(0.0, 1.0, h);
  }
  ys = uniform_lines(0.0, 1.0, h);
  const int nx = static_cast<int>(xs.size()) - 1;
  const int ny = static_cast<int>(ys.size()) - 1;

  TriMesh mesh;
  mesh.h = h;
  mesh.side = 1.0;
  mesh.cells_per_side = 1;
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  std::vector<bool> on_boundary;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      mesh.nodes.push_back({xs[i], ys[j]});
      on_boundary.push_back(i == 0 || j == 0 || i == nx || j == ny);
    }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    }

  std::vector<int> sign;
  if (geom.is_curved()) {
    double hmin = 1.0;
    for (int i = 0; i < nx; ++i) hmin = std::min(hmin, xs[i + 1] - xs[i]);
    for (int j = 0; j < ny; ++j) hmin = std::min(hmin, ys[j + 1] - ys[j]);
    conform_to_interface(geom, hmin, mesh.node_count(), on_boundary, mesh.nodes, mesh.triangles, sign);
  }

  mesh.regions.resize(mesh.triangles.size(), Region::Matrix);
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    if (geom.is_curved()) {
      const int smax = std::max({sign[tri[0]], sign[tri[1]], sign[tri[2]]});
      mesh.regions[t] = smax <= 0 ? Region::Inclusion : Region::Matrix;
    } else if (const auto* lam = std::get_if<Laminate>(&geom.shape())) {
      const double cx = (mesh.nodes[tri[0]][0] + mesh.nodes[tri[1]][0] + mesh.nodes[tri[2]][0]) / 3.0;
      mesh.regions[t] = cx < lam->theta ? Region::Inclusion : Region::Matrix;
    }
  }

  for (int t = 0; t < mesh.triangle_count(); ++t)
    if (!(mesh.triangle_area(t) > 0.0)) throw GeometryError("mesh construction produced a non-positive triangle");

  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      if (i < nx && j < ny) continue;
      const int mi = i == nx ? 0 : i;
      const int mj = j == ny ? 0 : j;
      mesh.periodic_pairs.push_back({id(i, j), id(mi, mj), {i == nx ? 1 : 0, j == ny ? 1 : 0}});
    }

  if (!geom.is_empty() && interface_edge_count(mesh) < 8)
    throw GeometryError("h too coarse to resolve the inclusion (fewer than 8 interface edges)");

  mesh.local_node_count = mesh.node_count();
  mesh.local_triangle_count = mesh.triangle_count();
  mesh.tile_nodes.resize(mesh.node_count());
  std::iota(mesh.tile_nodes.begin(), mesh.tile_nodes.end(), 0);
  return mesh;
}

TriMesh tile_cell_mesh(const TriMesh& cell, int K, double side, bool keep_periodic) {
  if (K < 1) throw GeometryError("tiling factor must be >= 1");
  const int nl = cell.node_count();
  const auto roots = resolve_masters(cell);
  const double cs = side / K;

  TriMesh mesh;
  mesh.h = cell.h;
  mesh.side = side;
  mesh.cells_per_side = K;
  mesh.local_node_count = nl;
  mesh.local_triangle_count = cell.triangle_count();

  std::vector<int> key_id(static_cast<size_t>(K + 1) * (K + 1) * nl, -1);
  auto key = [&](int tx, int ty, int m) { return (static_cast<size_t>(ty) * (K + 1) + tx) * nl + m; };
  std::vector<std::array<int, 3>> node_key;  // (tx, ty, m) per global node

  auto get_or_create = [&](int tx, int ty, int m) {
    int& slot = key_id[key(tx, ty, m)];
    if (slot < 0) {
      slot = mesh.node_count();
      const Point& y = cell.nodes[m];
      mesh.nodes.push_back({(tx + y[0]) * cs, (ty + y[1]) * cs});
      node_key.push_back({tx, ty, m});
    }
    return slot;
  };

  mesh.tile_nodes.resize(static_cast<size_t>(K) * K * nl);
  for (int ty = 0; ty < K; ++ty)
    for (int tx = 0; tx < K; ++tx) {
      const int tile = ty * K + tx;
      for (int i = 0; i < nl; ++i) {
        const auto& r = roots[i];
        mesh.tile_nodes[static_cast<size_t>(tile) * nl + i] = get_or_create(tx + r.wrap[0], ty + r.wrap[1], r.master);
      }
      for (int t = 0; t < cell.triangle_count(); ++t) {
        const auto& tri = cell.triangles[t];
        mesh.triangles.push_back({mesh.tile_node(tile, tri[0]), mesh.tile_node(tile, tri[1]), mesh.tile_node(tile, tri[2])});
        mesh.regions.push_back(cell.regions[t]);
      }
    }

  if (keep_periodic) {
    const int count = mesh.node_count();
    for (int g = 0; g < count; ++g) {
      const auto [tx, ty, m] = node_key[g];
      if (tx < K && ty < K) continue;
      const int master = get_or_create(tx % K, ty % K, m);
      mesh.periodic_pairs.push_back({g, master, {tx == K ? 1 : 0, ty == K ? 1 : 0}});
    }
  } else {
    const double tol = 1e-12 * side;
    for (int g = 0; g < mesh.node_count(); ++g) {
      const Point& p = mesh.nodes[g];
      if (p[0] < tol || p[1] < tol || p[0] > side - tol || p[1] > side - tol) mesh.dirichlet_nodes.push_back(g);
    }
  }
  return mesh;
}

TriMesh build_pack_mesh(const CellGeometry& geom, int K, double h) {
  if (K < 1) throw GeometryError("pack size K must be >= 1");
  return tile_cell_mesh(build_cell_mesh(geom, h), K, static_cast<double>(K), true);
}

TriMesh build_macro_mesh(const CellGeometry& geom, int N, double h, BoundaryCondition bc) {
  if (N < 1) throw GeometryError("cells per side N must be >= 1");
  return tile_cell_mesh(build_cell_mesh(geom, h), N, 1.0, bc == BoundaryCondition::Periodic);
}

}  // namespace poincare
