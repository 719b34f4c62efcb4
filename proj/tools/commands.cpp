#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "poincare/assembly.hpp"
#include "poincare/bloch.hpp"
#include "poincare/homogenization.hpp"
#include "poincare/laminate.hpp"
#include "poincare/mesh_io.hpp"
#include "poincare/spectral.hpp"

namespace poincare::cli {

using nlohmann::json;

namespace {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string coo(const SparseC& m) {
  std::ostringstream os;
  write_coo(os, m);
  return os.str();
}

std::string mesh_text(const TriMesh& mesh) { return mesh_to_json(mesh).dump() + "\n"; }

json complex_json(Complex z) { return {z.real(), z.imag()}; }

// ---------------------------------------------------------------------------

CommandResult cmd_bands(const RunConfig& c) {
  CommandResult r;
  const BandStructure bands = band_structure(c.geometry, c.grid_res, c.h, c.J);
  std::ostringstream csv;
  write_band_csv(csv, bands);
  r.files["bands.csv"] = csv.str();
  r.files["intervals.json"] = dump(band_intervals_json(bands));
  r.mesh_json = mesh_text(build_cell_mesh(c.geometry, c.h));
  std::ostringstream os;
  os << "bands: " << bands.bands() << " bands on a " << c.grid_res << "x" << c.grid_res << " grid";
  r.summary = os.str();
  return r;
}

CommandResult cmd_bounds(const RunConfig& c, const CliFlags& flags) {
  CommandResult r;
  const Bounds b = free_cell_bounds(c.geometry, c.h);
  r.files["bounds.json"] = dump({{"m", b.m}, {"M", b.M}, {"h", c.h}});
  const TriMesh mesh = build_cell_mesh(c.geometry, c.h);
  r.mesh_json = mesh_text(mesh);
  if (flags.dump_matrices) {
    const FormPair pair = assemble_forms(mesh, std::nullopt, ConstraintKind::FreeQuotient);
    r.files["num.coo"] = coo(pair.num);
    r.files["den.coo"] = coo(pair.den);
  }
  std::ostringstream os;
  os.precision(10);
  os << "bounds: m = " << b.m << ", M = " << b.M;
  r.summary = os.str();
  return r;
}

CommandResult cmd_homogenize(const RunConfig& c) {
  CommandResult r;
  const TriMesh cell = build_cell_mesh(c.geometry, c.h);
  r.mesh_json = mesh_text(cell);
  json tensors = json::array();
  std::ostringstream os;
  for (const auto& a : c.a) {
    const HomogenizedTensor t = homogenized_tensor(cell, a.value);
    tensors.push_back(tensor_json(t));
    os << "homogenize: a = " << a.value << " -> " << to_string(t.definiteness) << "\n";
  }
  if (!c.a.empty()) r.files["tensor.json"] = dump(c.a.size() == 1 ? tensors[0] : tensors);
  if (!c.scan.empty()) {
    std::ostringstream csv;
    write_scan_csv(csv, definiteness_scan(c.geometry, c.scan, c.h));
    r.files["scan.csv"] = csv.str();
    os << "homogenize: scanned " << c.scan.size() << " conductivities\n";
  }
  r.summary = os.str();
  if (!r.summary.empty()) r.summary.pop_back();
  return r;
}

struct OperatorProblem {
  TriMesh mesh;
  FormPair pair;
  OperatorLabel label;
};

OperatorProblem build_operator(const RunConfig& c) {
  OperatorProblem p;
  const int N = c.N.front();
  if (c.op == "cell" || c.op == "free_cell" || c.op == "bloch") {
    p.mesh = build_cell_mesh(c.geometry, c.h);
    if (c.op == "cell") {
      p.pair = assemble_forms(p.mesh, std::nullopt, ConstraintKind::PeriodicQuotient);
      p.label.kind = OperatorKind::Cell;
    } else if (c.op == "free_cell") {
      p.pair = assemble_forms(p.mesh, std::nullopt, ConstraintKind::FreeQuotient);
      p.label.kind = OperatorKind::FreeCell;
    } else {
      p.pair = c.eta.is_zero() ? assemble_forms(p.mesh, std::nullopt, ConstraintKind::PeriodicQuotient)
                               : assemble_forms(p.mesh, c.eta, ConstraintKind::QuasiPeriodic);
      p.label.kind = OperatorKind::Bloch;
      p.label.eta = c.eta;
    }
  } else if (c.op == "pack") {
    p.mesh = build_pack_mesh(c.geometry, c.K, c.h);
    p.pair = assemble_forms(p.mesh, std::nullopt, ConstraintKind::PeriodicQuotient);
    p.label.kind = OperatorKind::Pack;
    p.label.K = c.K;
  } else {
    const bool dirichlet = c.op == "finite_dirichlet";
    p.mesh = build_macro_mesh(c.geometry, N, c.h, dirichlet ? BoundaryCondition::Dirichlet : BoundaryCondition::Periodic);
    p.pair = assemble_forms(p.mesh, std::nullopt, dirichlet ? ConstraintKind::DirichletZero : ConstraintKind::PeriodicQuotient);
    p.label.kind = OperatorKind::Finite;
    p.label.N = N;
    p.label.bc = dirichlet ? BoundaryCondition::Dirichlet : BoundaryCondition::Periodic;
  }
  return p;
}

CommandResult cmd_spectrum(const RunConfig& c, const CliFlags& flags) {
  CommandResult r;
  const OperatorProblem p = build_operator(c);
  SpectrumResult res = solve_gevp(p.pair, c.k, c.k);
  res.label = p.label;
  const bool finite = p.label.kind == OperatorKind::Finite && p.label.bc == BoundaryCondition::Dirichlet;
  const double width = c.boundary_width.value_or(1.0 / c.N.front());

  std::ostringstream csv;
  csv.precision(15);
  csv << "operator,eta1,eta2,index,lambda,residual,boundary_energy\n";
  for (size_t i = 0; i < res.eigenvalues.size(); ++i) {
    csv << res.label.name() << ',' << res.label.eta.e1 << ',' << res.label.eta.e2 << ',' << i + 1 << ','
        << res.eigenvalues[i] << ',' << res.residuals[i] << ',';
    if (finite) csv << boundary_energy_fraction(res, static_cast<int>(i), p.mesh, width);
    csv << '\n';
  }
  r.files["spectrum.csv"] = csv.str();
  r.files["spectrum.json"] = dump({{"operator", res.label.name()},
                                   {"dofs", res.dofs},
                                   {"zero_multiplicity", res.zero_multiplicity},
                                   {"one_multiplicity", res.one_multiplicity},
                                   {"nontrivial_count", res.nontrivial.size()},
                                   {"clamp_violation", res.clamp_violation}});
  r.mesh_json = mesh_text(p.mesh);
  if (flags.dump_matrices) {
    r.files["num.coo"] = coo(p.pair.num);
    r.files["den.coo"] = coo(p.pair.den);
  }
  std::ostringstream os;
  os << "spectrum: " << res.label.name() << ", " << res.nontrivial.size() << " nontrivial eigenvalues, "
     << res.zero_multiplicity << " zero, " << res.one_multiplicity << " one";
  r.summary = os.str();
  return r;
}

// ---------------------------------------------------------------------------

struct Check {
  std::string name;
  double error = 0.0;
  double tolerance = 0.0;
  json detail;
  bool pass() const { return error <= tolerance; }
};

std::vector<double> farthest_from_half(std::vector<double> v, size_t count) {
  std::stable_sort(v.begin(), v.end(), [](double x, double y) { return std::abs(x - 0.5) > std::abs(y - 0.5); });
  v.resize(std::min(count, v.size()));
  std::sort(v.begin(), v.end());
  return v;
}

CommandResult cmd_verify_laminate(const RunConfig& c) {
  const double theta = c.geometry.theta();
  const TriMesh cell = build_cell_mesh(c.geometry, c.h);
  std::vector<Check> checks;

  {
    // Extreme Bloch values at eta against the oracle pairs.
    const SpectrumResult fem = bloch_spectrum_at(cell, c.eta, 1);
    const std::vector<double> oracle = laminate_bloch_values(theta, c.eta, std::max(c.n_max, 1), SectorRange::Integer);
    Check ch{"bloch_extremes", 0.0, c.tolerance, {}};
    if (fem.nontrivial.empty() || oracle.empty()) {
      ch.error = INFINITY;
    } else {
      ch.error = std::max(std::abs(fem.nontrivial.front() - oracle.front()), std::abs(fem.nontrivial.back() - oracle.back()));
      ch.detail = {{"fem", {fem.nontrivial.front(), fem.nontrivial.back()}}, {"oracle", {oracle.front(), oracle.back()}}};
    }
    checks.push_back(ch);
  }
  for (int N : c.N) {
    // Periodic finite spectrum: the 12 values farthest from 1/2.
    const TriMesh macro = build_macro_mesh(c.geometry, N, c.h, BoundaryCondition::Periodic);
    const SpectrumResult fem = solve_gevp(assemble_forms(macro, std::nullopt, ConstraintKind::PeriodicQuotient), 1, 1);
    const auto f = farthest_from_half(fem.nontrivial, 12);
    std::vector<double> oracle;
    for (double v : laminate_spectrum({theta, N, c.n_max, SectorRange::Integer}))
      if (v > kTrivialThreshold && v < 1.0 - kTrivialThreshold) oracle.push_back(v);
    const auto o = farthest_from_half(oracle, 12);
    Check ch{"finite_periodic_N" + std::to_string(N), 0.0, c.tolerance, {}};
    if (f.size() != o.size()) {
      ch.error = INFINITY;
    } else {
      for (size_t i = 0; i < f.size(); ++i) ch.error = std::max(ch.error, std::abs(f[i] - o[i]));
    }
    ch.detail = {{"fem", f}, {"oracle", o}};
    checks.push_back(ch);
  }
  for (const auto& a : c.a) {
    const double av = a.value.real();
    std::ostringstream name;
    name << "tensor_a" << av;
    Check ch{name.str(), 0.0, c.tensor_tolerance, {}};
    Check regime{"regime_a" + name.str().substr(8), 0.0, 0.0, {}};
    try {
      const HomogenizedTensor t = homogenized_tensor(cell, av);
      const LaminateTensor o = laminate_tensor(theta, av);
      ch.error = std::max({std::abs(t.entries(0, 0) - o.lambda_minus), std::abs(t.entries(1, 1) - o.lambda_plus),
                           std::abs(t.entries(0, 1)), std::abs(t.entries(1, 0))});
      ch.detail = {{"fem", {t.entries(0, 0).real(), t.entries(1, 1).real()}},
                   {"oracle", {o.lambda_minus.real(), o.lambda_plus.real()}}};
      const Definiteness expected = laminate_regime(theta, av);
      regime.error = t.definiteness == expected ? 0.0 : 1.0;
      regime.detail = {{"fem", to_string(t.definiteness)}, {"oracle", to_string(expected)}};
    } catch (const NumericalError& e) {
      ch.error = INFINITY;
      ch.detail = {{"error", e.what()}};
      regime.error = 1.0;
    }
    checks.push_back(ch);
    checks.push_back(regime);
  }
  {
    // The exceptional value -theta/(1-theta) comes from the cell eigenvalue 1-theta.
    const SpectrumResult fem = solve_gevp(assemble_forms(cell, std::nullopt, ConstraintKind::PeriodicQuotient), 1, 1);
    double best = INFINITY;
    for (double v : fem.nontrivial) best = std::min(best, std::abs(v - (1.0 - theta)));
    checks.push_back({"cell_contains_1_minus_theta", best, c.tolerance, {{"oracle", 1.0 - theta}}});
  }

  CommandResult r;
  json list = json::array();
  bool all = true;
  std::ostringstream os;
  for (const Check& ch : checks) {
    all = all && ch.pass();
    json item = {{"name", ch.name}, {"error", std::isfinite(ch.error) ? json(ch.error) : json(nullptr)},
                 {"tolerance", ch.tolerance}, {"pass", ch.pass()}};
    if (!ch.detail.is_null()) item["detail"] = ch.detail;
    list.push_back(item);
    os << (ch.pass() ? "PASS " : "FAIL ") << ch.name << " (error " << ch.error << ", tolerance " << ch.tolerance << ")\n";
  }
  r.files["verify.json"] = dump({{"theta", theta}, {"h", c.h}, {"checks", list}, {"pass", all}});
  r.mesh_json = mesh_text(cell);
  os << (all ? "verify-laminate: all checks passed" : "verify-laminate: some checks failed");
  r.summary = os.str();
  r.exit_code = all ? 0 : 3;
  return r;
}

CommandResult cmd_converge(const RunConfig& c) {
  CommandResult r;
  const Source f = c.source.build();
  std::ostringstream os;
  if (!c.a.empty()) {
    std::vector<HomogenizationErrorRow> rows;
    for (const auto& a : c.a) {
      const auto part = homogenization_error(c.geometry, f, a.value, c.N, c.h);
      for (const auto& row : part) {
        if (row.resonant) os << "converge: resonance at N = " << row.N << ", a = " << a.value << " (excluded)\n";
        rows.push_back(row);
      }
    }
    std::ostringstream csv;
    write_error_csv(csv, rows);
    r.files["converge.csv"] = csv.str();
    os << "converge: " << rows.size() << " (N, a) pairs\n";
  }
  if (!c.contrast.empty()) {
    const int N = c.N.front();
    const ContrastRate rate = high_contrast_rate(c.geometry, N, f, c.contrast, c.h);
    std::ostringstream csv;
    csv.precision(15);
    csv << "N,a_re,a_im,error_H1\n";
    for (size_t i = 0; i < rate.a_values.size(); ++i) csv << N << ',' << rate.a_values[i] << ",0," << rate.errors[i] << '\n';
    r.files["contrast.csv"] = csv.str();
    r.files["contrast.json"] = dump({{"N", N},
                                     {"slope", rate.degenerate ? json(nullptr) : json(rate.slope)},
                                     {"degenerate", rate.degenerate}});
    os << "converge: contrast slope " << (rate.degenerate ? std::string("undefined (all errors zero)") : std::to_string(rate.slope))
       << "\n";
  }
  r.mesh_json = mesh_text(build_macro_mesh(c.geometry, c.N.front(), c.h, BoundaryCondition::Dirichlet));
  r.summary = os.str();
  if (!r.summary.empty()) r.summary.pop_back();
  return r;
}

CommandResult cmd_solve(const RunConfig& c, const CliFlags& flags) {
  CommandResult r;
  const Source f = c.source.build();
  const TriMesh mesh = build_macro_mesh(c.geometry, c.N.front(), c.h, c.bc);
  r.mesh_json = mesh_text(mesh);
  json reports = json::array();
  std::ostringstream os;
  for (size_t i = 0; i < c.a.size(); ++i) {
    const SolveReport rep = c.a[i].infinite ? solve_infinite(mesh, f) : solve_source(mesh, c.a[i].value, f, {c.resolvent_check});
    json item = {{"a", c.a[i].infinite ? json("inf") : complex_json(rep.a)},
                 {"lambda", complex_json(rep.lambda)},
                 {"energy_norm", rep.energy_norm},
                 {"residual", rep.residual},
                 {"near_resonance", std::isfinite(rep.near_resonance) ? json(rep.near_resonance) : json(nullptr)},
                 {"near_resonance_exact", rep.near_resonance_exact}};
    if (rep.resolvent_difference) item["resolvent_difference"] = *rep.resolvent_difference;
    if (c.write_fields) {
      const std::string name = "field_" + std::to_string(i) + ".json";
      r.files[name] = field_to_json(mesh, rep.field).dump() + "\n";
      item["field_file"] = name;
    }
    reports.push_back(item);
    os << "solve: a = " << (c.a[i].infinite ? std::string("inf") : (std::ostringstream() << rep.a).str())
       << ", energy " << rep.energy_norm << "\n";
  }
  if (flags.dump_matrices) {
    const FormPair pair = assemble_forms(
        mesh, std::nullopt, c.bc == BoundaryCondition::Dirichlet ? ConstraintKind::DirichletZero : ConstraintKind::PeriodicQuotient);
    r.files["num.coo"] = coo(pair.num);
    r.files["den.coo"] = coo(pair.den);
  }
  r.files["solve.json"] = dump(reports);
  r.summary = os.str();
  if (!r.summary.empty()) r.summary.pop_back();
  return r;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw ConfigError("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void check_flags(const CliFlags& flags) {
  if (flags.jobs < 0) throw ConfigError("--jobs must be >= 0");
  if (!flags.mesh_out.empty()) {
    const std::filesystem::path p(flags.mesh_out);
    const std::filesystem::path dir = p.has_parent_path() ? p.parent_path() : std::filesystem::path(".");
    if (!std::filesystem::is_directory(dir)) throw ConfigError("--mesh-out directory '" + dir.string() + "' does not exist");
    if (::access(dir.c_str(), W_OK) != 0) throw ConfigError("--mesh-out directory '" + dir.string() + "' is not writable");
  }
}

CommandResult run_command(const RunConfig& c, const CliFlags& flags) {
  if (flags.dump_matrices && c.command != "spectrum" && c.command != "bounds" && c.command != "solve")
    throw ConfigError("--dump-matrices is supported by spectrum, bounds and solve");
  if (c.command == "bands") return cmd_bands(c);
  if (c.command == "bounds") return cmd_bounds(c, flags);
  if (c.command == "homogenize") return cmd_homogenize(c);
  if (c.command == "spectrum") return cmd_spectrum(c, flags);
  if (c.command == "verify-laminate") return cmd_verify_laminate(c);
  if (c.command == "converge") return cmd_converge(c);
  if (c.command == "solve") return cmd_solve(c, flags);
  throw ConfigError("unknown command '" + c.command + "'");
}

void write_outputs(const RunConfig& c, const CliFlags& flags, const CommandResult& result) {
  const std::filesystem::path dir(c.output_dir);
  for (const auto& [name, content] : result.files) write_atomic(dir / name, content);
  if (!flags.mesh_out.empty() && !result.mesh_json.empty()) write_atomic(flags.mesh_out, result.mesh_json);
}

}  // namespace poincare::cli
