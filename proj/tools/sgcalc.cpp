// Command-line front end: graph/cell-table/spectrum exports, flux sweeps,
// gauge checks and the invariant verification battery.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sg/sg.hpp"

namespace {

void write_text(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw sg::ParseError("cannot write " + out_path);
  out << text;
}

sg::OperatorMatrix build_operator(const std::string& op, const sg::LevelGraph& g,
                                  const sg::MassVector& m, double flux,
                                  const std::string& a_file,
                                  const std::string& v_file) {
  if (op == "laplacian") return sg::energy_laplacian(g, m);
  if (op == "form-laplacian") return sg::form_laplacian(g, m);
  if (op == "dirac") return sg::assemble_dirac(g, m).op;

  sg::PotentialPair p = sg::load_potential(g, a_file, v_file);
  if (a_file.empty() && flux != 0.0) p.a = sg::uniform_flux_phases(g, flux);
  if (op == "magnetic-linear") return sg::linear_hamiltonian(g, m, p);
  if (op == "magnetic-peierls") return sg::peierls_hamiltonian(g, m, p);
  throw sg::ContractViolation("unknown operator: " + op);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "sgcalc: vector analysis, Dirac and magnetic Schroedinger operators on "
      "level approximations of the Sierpinski gasket"};
  app.require_subcommand(1);

  int level = 3;
  int max_level = sg::kDefaultMaxLevel;
  std::uint64_t seed = 7;
  double tol = 1e-10;
  std::string out_path;

  auto add_common = [&](CLI::App* sub, bool with_level = true) {
    if (with_level) sub->add_option("--level", level, "graph level");
    sub->add_option("--max-level", max_level, "configured level cap");
    sub->add_option("--out", out_path, "output path (default stdout)");
  };

  // graph
  auto* cmd_graph = app.add_subcommand("graph", "emit the level graph as JSON");
  add_common(cmd_graph);

  // kusuoka
  bool probability = false;
  auto* cmd_kusuoka =
      app.add_subcommand("kusuoka", "emit the cell table as CSV");
  add_common(cmd_kusuoka);
  cmd_kusuoka->add_flag("--probability", probability,
                        "renormalize total mass 2 -> 1");

  // spectrum
  std::string op_name = "laplacian";
  std::string a_file, v_file, dump_operator;
  double flux = 0.0;
  int count = -1;
  auto* cmd_spectrum =
      app.add_subcommand("spectrum", "eigenvalues of an operator as JSON");
  add_common(cmd_spectrum);
  cmd_spectrum->add_option("--op", op_name,
                           "laplacian | form-laplacian | dirac | "
                           "magnetic-linear | magnetic-peierls");
  cmd_spectrum->add_option("--flux", flux,
                           "uniform per-cell holonomy (magnetic operators)");
  cmd_spectrum->add_option("--a-file", a_file, "edge potential CSV");
  cmd_spectrum->add_option("--v-file", v_file, "vertex potential CSV");
  cmd_spectrum->add_option("--count", count,
                           "number of extremal eigenvalues (-1 = all)");
  cmd_spectrum->add_option("--tol", tol, "iterative solver tolerance");
  cmd_spectrum->add_option("--seed", seed, "iterative solver start seed");
  cmd_spectrum->add_option("--dump-operator", dump_operator,
                           "also write the matrix in triplet text form");

  // flux-sweep
  double sweep_from = 0.0, sweep_to = 2.0 * M_PI;
  int sweep_steps = 32;
  std::string sweep_op = "magnetic-peierls";
  auto* cmd_sweep = app.add_subcommand(
      "flux-sweep", "eigenvalues over a uniform per-cell flux grid, CSV");
  add_common(cmd_sweep);
  cmd_sweep->add_option("--from", sweep_from, "first flux value");
  cmd_sweep->add_option("--to", sweep_to, "last flux value");
  cmd_sweep->add_option("--steps", sweep_steps, "number of flux values");
  cmd_sweep->add_option("--op", sweep_op,
                        "magnetic-peierls | magnetic-linear");

  // gauge-check
  auto* cmd_gauge =
      app.add_subcommand("gauge-check", "gauge covariance suite; exit 0 iff pass");
  add_common(cmd_gauge);
  cmd_gauge->add_option("--seed", seed, "random data seed");
  cmd_gauge->add_option("--tol", tol, "solver tolerance");

  // verify
  auto* cmd_verify =
      app.add_subcommand("verify", "full invariant suite; exit 0 iff pass");
  add_common(cmd_verify);
  cmd_verify->add_option("--seed", seed, "random data seed");
  cmd_verify->add_option("--tol", tol, "solver tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*cmd_graph) {
      const sg::LevelGraph g = sg::build_level_graph(level, max_level);
      write_text(out_path, sg::graph_to_json(g).dump(2) + "\n");
    } else if (*cmd_kusuoka) {
      sg::KusuokaOptions opt;
      opt.probability = probability;
      opt.max_level = max_level;
      const auto table = sg::level_cell_table(level, opt);
      std::ostringstream os;
      os << "word,mass,z11,z12,z22,lambda_min,lambda_max\n";
      for (const auto& c : table) {
        const auto [lo, hi] = sg::symmetric_eigenvalues(c.z);
        os << c.word.str() << ',' << sg::fmt17(c.mass) << ','
           << sg::fmt17(c.z(0, 0)) << ',' << sg::fmt17(c.z(0, 1)) << ','
           << sg::fmt17(c.z(1, 1)) << ',' << sg::fmt17(lo) << ','
           << sg::fmt17(hi) << '\n';
      }
      write_text(out_path, os.str());
    } else if (*cmd_spectrum) {
      const sg::LevelGraph g = sg::build_level_graph(level, max_level);
      const sg::MassVector m = sg::vertex_masses(g);
      const sg::OperatorMatrix op =
          build_operator(op_name, g, m, flux, a_file, v_file);
      if (!dump_operator.empty()) sg::write_operator_triplets(dump_operator, op);
      sg::EigenOptions eopt;
      eopt.count = count;
      eopt.tol = tol;
      eopt.seed = seed;
      const sg::SpectrumReport rep = sg::hermitian_eigen(op, eopt);
      write_text(out_path, sg::spectrum_to_json(level, op_name, rep).dump(2) + "\n");
    } else if (*cmd_sweep) {
      if (sweep_steps < 1)
        throw sg::ContractViolation("flux-sweep: steps must be >= 1");
      const sg::LevelGraph g = sg::build_level_graph(level, max_level);
      const sg::MassVector m = sg::vertex_masses(g);
      std::ostringstream os;
      os << "flux,index,eigenvalue\n";
      for (int s = 0; s < sweep_steps; ++s) {
        const double f =
            sweep_steps == 1
                ? sweep_from
                : sweep_from + (sweep_to - sweep_from) * s / (sweep_steps - 1);
        sg::PotentialPair p = sg::zero_potential(g);
        p.a = sg::uniform_flux_phases(g, f);
        const sg::OperatorMatrix h = sweep_op == "magnetic-linear"
                                         ? sg::linear_hamiltonian(g, m, p)
                                         : sg::peierls_hamiltonian(g, m, p);
        const sg::SpectrumReport rep = sg::hermitian_eigen(h);
        for (Eigen::Index i = 0; i < rep.eigenvalues.size(); ++i)
          os << sg::fmt17(f) << ',' << i << ','
             << sg::fmt17(rep.eigenvalues[i]) << '\n';
      }
      write_text(out_path, os.str());
    } else if (*cmd_gauge) {
      sg::VerifyOptions vopt{level, seed, tol, max_level};
      const sg::VerifyReport rep = sg::run_gauge_checks(vopt);
      write_text(out_path, sg::format_report(rep, "sgcalc gauge-check", vopt));
      return rep.all_pass() ? 0 : 3;
    } else if (*cmd_verify) {
      sg::VerifyOptions vopt{level, seed, tol, max_level};
      const sg::VerifyReport rep = sg::run_verification(vopt);
      write_text(out_path, sg::format_report(rep, "sgcalc verify", vopt));
      return rep.all_pass() ? 0 : 3;
    }
  } catch (const sg::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const sg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
