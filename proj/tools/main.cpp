#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include "commands.hpp"
#include "poincare/blas_runtime.hpp"

namespace {

const char* kOutputs = R"(Outputs (written into the config's "output" directory):
  bands            bands.csv       eta1,eta2,side,j,lambda   (side low|high, j 1-based)
                   intervals.json  [{j, side, min, max}]
  bounds           bounds.json     {m, M, h}
  homogenize       tensor.json     {a_re, a_im, A, A_im, definiteness, residuals}
                   scan.csv        a,lambda1,lambda2,class
  spectrum         spectrum.csv    operator,eta1,eta2,index,lambda,residual,boundary_energy
                   spectrum.json   {operator, dofs, zero_multiplicity, one_multiplicity, ...}
  verify-laminate  verify.json     {checks: [{name, error, tolerance, pass}], pass}
  converge         converge.csv    N,a_re,a_im,error_L2,error_H1,energy
                   contrast.csv    N,a_re,a_im,error_H1
                   contrast.json   {N, slope, degenerate}
  solve            solve.json      [{a, lambda, energy_norm, residual, near_resonance, ...}]
                   field_<i>.json  mesh JSON plus "field": [[re, im], ...]

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 near-resonance.)";

}  // namespace

int main(int argc, char** argv) {
  poincare::pin_blas_kernel(argc, argv);

  CLI::App app{"Poincare variational operator spectra and homogenized tensors"};
  app.footer(kOutputs);
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  poincare::cli::CliFlags flags;
  std::string config_path;
  app.add_option("--jobs", flags.jobs, "Number of OpenMP threads (0 = default)");
  app.add_option("--mesh-out", flags.mesh_out, "Also write the mesh used as JSON to this path");
  app.add_flag("--dump-matrices", flags.dump_matrices,
               "Write num.coo and den.coo (row col re im) into the output directory (spectrum, bounds, solve)");

  const char* descriptions[][2] = {
      {"bands", "Bloch band functions on a quasi-momentum grid"},
      {"bounds", "Uniform gap bounds (m, M) from the free-cell operator"},
      {"homogenize", "Homogenized tensor and definiteness scan"},
      {"spectrum", "Spectrum of a cell, Bloch, finite or pack operator"},
      {"verify-laminate", "Compare the finite-element pipelines against the laminate closed forms"},
      {"converge", "Homogenization error and high-contrast rate"},
      {"solve", "Conductivity source problem"},
  };
  for (const auto& d : descriptions) {
    CLI::App* sub = app.add_subcommand(d[0], d[1]);
    sub->add_option("--config", config_path, "JSON config file")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    poincare::cli::check_flags(flags);
    if (flags.jobs > 0) omp_set_num_threads(flags.jobs);
    const poincare::cli::RunConfig config = poincare::cli::load_config(config_path, command);
    const poincare::cli::CommandResult result = poincare::cli::run_command(config, flags);
    poincare::cli::write_outputs(config, flags, result);
    if (!result.summary.empty()) std::cout << result.summary << "\n";
    return result.exit_code;
  } catch (const poincare::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const poincare::NearResonanceError& e) {
    std::cerr << "near resonance: " << e.what() << " (distance " << e.distance() << ")\n";
    return 4;
  } catch (const poincare::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const poincare::GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
