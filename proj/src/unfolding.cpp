#include "poincare/unfolding.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "poincare/assembly.hpp"

namespace poincare {

namespace {

void check_tiled(const TriMesh& macro) {
  if (macro.tile_nodes.empty() || macro.local_node_count == 0)
    throw ConfigError("unfolding needs a tiled macro mesh (tiling information missing)");
}

VectorC solve_real_spd(const Eigen::SimplicialLLT<SparseR>& llt, const VectorC& b) {
  const VectorR re = llt.solve(b.real());
  const VectorR im = llt.solve(b.imag());
  VectorC x(b.size());
  x.real() = re;
  x.imag() = im;
  return x;
}

}  // namespace

Unfolding::Unfolding(const TriMesh& macro) : macro_(&macro), N_(macro.cells_per_side) {
  check_tiled(macro);
  const int nl = macro.local_node_count;
  const double scale = 1.0 / macro.cell_size();
  std::unordered_map<int, int> local_of;
  cell_.nodes.resize(nl);
  for (int i = 0; i < nl; ++i) {
    const int g = macro.tile_node(0, i);
    local_of[g] = i;
    cell_.nodes[i] = {macro.nodes[g][0] * scale, macro.nodes[g][1] * scale};
  }
  for (int t = 0; t < macro.local_triangle_count; ++t) {
    const auto& tri = macro.triangles[t];
    cell_.triangles.push_back({local_of.at(tri[0]), local_of.at(tri[1]), local_of.at(tri[2])});
    cell_.regions.push_back(macro.regions[t]);
  }
  cell_.h = macro.h;
  mass_macro_ = assemble_mass(macro);
  mass_cell_ = assemble_mass(cell_);
  mass_solver_ = std::make_shared<Eigen::SimplicialLLT<SparseR>>(mass_macro_);
  if (mass_solver_->info() != Eigen::Success) throw NumericalError("macro mass matrix factorization failed");
}

TwoScaleField Unfolding::unfold(const VectorC& u) const {
  if (u.size() != macro_->node_count()) throw ConfigError("unfold: field does not match the macro mesh");
  const int nl = macro_->local_node_count;
  TwoScaleField U;
  U.N = N_;
  U.micro.resize(nl, N_ * N_);
  for (int t = 0; t < N_ * N_; ++t)
    for (int i = 0; i < nl; ++i) U.micro(i, t) = u[macro_->tile_node(t, i)];
  return U;
}

VectorC Unfolding::project(const TwoScaleField& U) const {
  if (U.N != N_ || U.micro.rows() != macro_->local_node_count || U.micro.cols() != N_ * N_)
    throw ConfigError("project: two-scale field does not match the macro mesh");
  VectorC rhs = VectorC::Zero(macro_->node_count());
  const double w = 1.0 / (static_cast<double>(N_) * N_);
  for (int t = 0; t < N_ * N_; ++t) {
    const VectorC m = mass_cell_.cast<Complex>() * U.micro.col(t);
    for (int i = 0; i < macro_->local_node_count; ++i) rhs[macro_->tile_node(t, i)] += w * m[i];
  }
  return solve_real_spd(*mass_solver_, rhs);
}

Complex Unfolding::inner(const VectorC& u, const VectorC& v) const {
  return u.dot(mass_macro_.cast<Complex>() * v);
}

Complex Unfolding::inner(const TwoScaleField& U, const TwoScaleField& V) const {
  Complex s = 0.0;
  const SparseC M = mass_cell_.cast<Complex>();
  for (int t = 0; t < N_ * N_; ++t) s += U.micro.col(t).dot(M * V.micro.col(t));
  return s / (static_cast<double>(N_) * N_);
}

Complex Unfolding::integral(const VectorC& u) const {
  return (mass_macro_.cast<Complex>() * u).sum();
}

Complex Unfolding::integral(const TwoScaleField& U) const {
  Complex s = 0.0;
  const SparseC M = mass_cell_.cast<Complex>();
  for (int t = 0; t < N_ * N_; ++t) s += (M * U.micro.col(t)).sum();
  return s / (static_cast<double>(N_) * N_);
}

TwoScaleField unfold(const TriMesh& macro, const VectorC& u) { return Unfolding(macro).unfold(u); }

VectorC project(const TriMesh& macro, const TwoScaleField& U) { return Unfolding(macro).project(U); }

Complex Q1Field::operator()(Point x) const {
  const auto split = [&](double s, int& i) {
    const double t = s * N;
    i = std::clamp(static_cast<int>(std::floor(t)), 0, N - 1);
    return t - i;
  };
  int i = 0, j = 0;
  const double z1 = split(x[0], i);
  const double z2 = split(x[1], j);
  const auto v = [&](int a, int b) { return vertex[(j + b) * (N + 1) + (i + a)]; };
  return v(0, 0) * (1 - z1) * (1 - z2) + v(1, 0) * z1 * (1 - z2) + v(0, 1) * (1 - z1) * z2 + v(1, 1) * z1 * z2;
}

double Q1Field::l2_norm() const {
  // 1D P1 mass on [0,1]: [[1/3, 1/6], [1/6, 1/3]].
  const double m1[2][2] = {{1.0 / 3.0, 1.0 / 6.0}, {1.0 / 6.0, 1.0 / 3.0}};
  double s = 0.0;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          const Complex va = vertex[(j + a / 2) * (N + 1) + i + a % 2];
          const Complex vb = vertex[(j + b / 2) * (N + 1) + i + b % 2];
          s += (std::conj(va) * vb).real() * m1[a % 2][b % 2] * m1[a / 2][b / 2];
        }
  return std::sqrt(std::max(s, 0.0) / (static_cast<double>(N) * N));
}

Q1Field interpolate_q1(const VectorC& averages, int N) {
  if (N < 1) throw ConfigError("interpolate_q1 needs N >= 1");
  if (averages.size() != (N + 1) * (N + 1)) throw ConfigError("interpolate_q1 needs (N+1)^2 cell averages");
  return Q1Field{N, averages};
}

Q1Field interpolate_q1_zero_extended(const VectorC& averages, int N) {
  if (averages.size() != N * N) throw ConfigError("interpolate_q1 needs N^2 cell averages");
  VectorC ext = VectorC::Zero((N + 1) * (N + 1));
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) ext[j * (N + 1) + i] = averages[j * N + i];
  return interpolate_q1(ext, N);
}

VectorC cell_averages(const TriMesh& macro, const VectorC& u) {
  check_tiled(macro);
  if (u.size() != macro.node_count()) throw ConfigError("cell_averages: field does not match the mesh");
  const int N = macro.cells_per_side;
  const double cell_area = macro.cell_size() * macro.cell_size();
  VectorC avg = VectorC::Zero(N * N);
  for (int t = 0; t < macro.triangle_count(); ++t) {
    const auto& tri = macro.triangles[t];
    avg[t / macro.local_triangle_count] += macro.triangle_area(t) * (u[tri[0]] + u[tri[1]] + u[tri[2]]) / 3.0;
  }
  return avg / cell_area;
}

std::array<VectorC, 2> cell_gradient_averages(const TriMesh& macro, const VectorC& u) {
  check_tiled(macro);
  if (u.size() != macro.node_count()) throw ConfigError("cell_gradient_averages: field does not match the mesh");
  const int N = macro.cells_per_side;
  const double cell_area = macro.cell_size() * macro.cell_size();
  std::array<VectorC, 2> avg{VectorC::Zero(N * N), VectorC::Zero(N * N)};
  for (int t = 0; t < macro.triangle_count(); ++t) {
    const P1Element e = p1_element(macro, t);
    const int tile = t / macro.local_triangle_count;
    for (int v = 0; v < 3; ++v)
      for (int i = 0; i < 2; ++i) avg[i][tile] += e.area * e.grad[v][i] * u[macro.triangles[t][v]];
  }
  for (auto& a : avg) a /= cell_area;
  return avg;
}

VectorC corrector_expand(const TriMesh& macro, const VectorC& u0, const std::array<VectorC, 2>& chi,
                         double cutoff_width) {
  check_tiled(macro);
  if (!(cutoff_width > 0.0)) throw ConfigError("cutoff width must be positive");
  const int nl = macro.local_node_count;
  for (const auto& c : chi)
    if (c.size() != nl) throw ConfigError("corrector: cell solution does not match the reference cell mesh");
  if (macro.side != 1.0) throw ConfigError("corrector expansion expects the unit macro domain");
  const int N = macro.cells_per_side;
  const double eps = macro.cell_size();
  const auto grads = cell_gradient_averages(macro, u0);
  const std::array<Q1Field, 2> I{interpolate_q1_zero_extended(grads[0], N), interpolate_q1_zero_extended(grads[1], N)};

  VectorC out = u0;
  for (int t = 0; t < N * N; ++t)
    for (int i = 0; i < nl; ++i) {
      const int g = macro.tile_node(t, i);
      const Point& x = macro.nodes[g];
      const double dist = std::min({x[0], 1.0 - x[0], x[1], 1.0 - x[1]});
      const double zeta = std::clamp(dist / cutoff_width, 0.0, 1.0);
      out[g] = u0[g] + eps * zeta * (I[0](x) * chi[0][i] + I[1](x) * chi[1][i]);
    }
  return out;
}

}  // namespace poincare
