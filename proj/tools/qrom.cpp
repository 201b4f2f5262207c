// qrom: scenario-driven DNS / POD / reduced-model runner.
//
// Exit codes: 0 ok, 1 usage, 2 config, 3 artifact I/O, 4 solver,
// 5 invalid request (e.g. M beyond the basis, fpw on a bounded domain).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qrom/artifacts.hpp"
#include "qrom/errors.hpp"
#include "qrom/fpw.hpp"
#include "qrom/kernels.hpp"
#include "qrom/scenario.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace qrom;

namespace {

enum Exit { kOk = 0, kUsage = 1, kConfig = 2, kIo = 3, kSolver = 4, kInvalid = 5 };

class InvalidRequest : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Common {
  std::string scenario;
  std::string out;
  std::string params;
};

struct Run {
  Run(fs::path path, Scenario sc)
      : scenario_path(std::move(path)), scenario(std::move(sc)), fields(build_fields(scenario)) {}

  fs::path scenario_path;
  Scenario scenario;
  ScenarioFields fields;
  fs::path out;
  json manifest;

  void artifact(const std::string& key, const fs::path& p) { manifest["artifacts"][key] = p.string(); }
  void timing(const std::string& key, double s) { manifest["timings_s"][key] = s; }

  void write_manifest(const std::string& command) {
    manifest["command"] = command;
    const fs::path p = out / ("manifest_" + command + ".json");
    io::write_atomic(p, [&](std::ostream& os) { os << manifest.dump(2) << '\n'; });
  }
};

Run open_run(const Common& c) {
  if (!fs::exists(c.scenario)) throw ConfigError("scenario file not found: " + c.scenario);
  const auto t0 = Clock::now();
  Run r(c.scenario, load_scenario(c.scenario));
  r.out = c.out.empty() ? fs::path("out") / r.scenario.name : fs::path(c.out);
  fs::create_directories(r.out);
  r.manifest["scenario"] = fs::absolute(r.scenario_path).string();
  r.manifest["config"] = r.scenario.resolved;
  r.manifest["grid"] = {{"nx", r.fields.grid.nx()}, {"ny", r.fields.grid.ny()}, {"h_nm", r.fields.grid.h()}};
  r.manifest["threads"] = kernels::thread_count();
  r.timing("setup", seconds_since(t0));
  return r;
}

json params_json(const Run& r, const ScenarioParams& p) {
  json j = json::object();
  const auto names = param_names(r.scenario);
  for (std::size_t k = 0; k < names.size(); ++k) j[names[k]] = p.values[k];
  return j;
}

template <typename F>
void write_text(Run& r, const std::string& key, const fs::path& name, F&& body) {
  const fs::path p = r.out / name;
  io::write_atomic(p, body);
  r.artifact(key, p);
}

// Basis directory layout written by `train`.
struct BasisFiles {
  fs::path dir;
  fs::path basis() const { return dir / "basis.qwf"; }
  fs::path model() const { return dir / "basis.podh"; }
};

io::WavefunctionDump load_basis(const Run& r, const BasisFiles& files) {
  auto dump = io::read_qwf1(files.basis());
  if (static_cast<int>(dump.nx) != r.fields.grid.nx() || static_cast<int>(dump.ny) != r.fields.grid.ny())
    throw ConfigError("basis grid " + std::to_string(dump.nx) + "x" + std::to_string(dump.ny) +
                      " does not match the scenario grid");
  return dump;
}

// Cached reduced model, assembled (and stored) on first use.
ReducedModel load_or_assemble(Run& r, const BasisFiles& files, const Eigen::MatrixXd& modes) {
  const auto names = param_names(r.scenario);
  ReducedModel model;
  if (fs::exists(files.model())) {
    model = io::read_podh(files.model());
    if (model.potential_terms.size() != names.size() || model.max_modes() != modes.cols())
      throw ConfigError(files.model().string() + " does not match the scenario and basis");
    model.term_names = names;
    r.manifest["reduced_model_cached"] = true;
  } else {
    const auto t0 = Clock::now();
    model = assemble_reduced(modes, r.fields.grid, r.fields.mass, r.fields.assembly, r.scenario.kinetic);
    r.timing("assemble_reduced", seconds_since(t0));
    io::write_podh(files.model(), model);
    r.manifest["reduced_model_cached"] = false;
  }
  r.artifact("reduced_model", files.model());
  return model;
}

void check_modes(int m, Eigen::Index available) {
  if (m < 1 || m > available)
    throw InvalidRequest("M = " + std::to_string(m) + " outside the basis size " +
                         std::to_string(available));
}

int cmd_dns(const Common& c, int states, bool states_csv) {
  auto r = open_run(c);
  const auto params = parse_params(r.scenario, c.params);
  const int k = states > 0 ? states : r.scenario.dns_states;
  auto t0 = Clock::now();
  const auto h = assemble_hamiltonian(r.fields.grid, r.fields.mass,
                                      assemble_potential(r.fields.assembly, params));
  r.timing("assemble", seconds_since(t0));
  t0 = Clock::now();
  const auto sol = solve_lowest(h, k, r.scenario.eigen);
  r.timing("eigensolve", seconds_since(t0));

  const fs::path dump = r.out / "dns.qwf";
  io::write_qwf1(dump, r.fields.grid.nx(), r.fields.grid.ny(), sol.energies, sol.states);
  r.artifact("wavefunctions", dump);
  write_text(r, "energies", "dns_energies.csv",
             [&](std::ostream& os) { io::write_energies_csv(os, sol.energies); });
  if (states_csv)
    write_text(r, "states_csv", "dns_states.csv",
               [&](std::ostream& os) { io::write_states_csv(os, r.fields.grid, sol.states); });
  r.manifest["params"] = params_json(r, params);
  r.manifest["max_residual_ev"] = sol.residual_norms.maxCoeff();
  r.write_manifest("dns");

  for (Eigen::Index i = 0; i < sol.energies.size(); ++i)
    std::printf("QS%-3d %.6f eV\n", static_cast<int>(i + 1), sol.energies[i]);
  return kOk;
}

int cmd_train(const Common& c) {
  auto r = open_run(c);
  const auto& plan = r.scenario.plan;
  if (plan.configs.empty()) throw ConfigError("scenario declares no training configurations");
  const auto& w = r.fields.grid.weights();

  auto t0 = Clock::now();
  const auto snaps = collect_snapshots(plan, r.fields.grid, r.fields.mass, r.fields.assembly,
                                       r.scenario.eigen);
  r.timing("snapshots", seconds_since(t0));
  t0 = Clock::now();
  const auto basis = compute_modes(snaps, gram_matrix(snaps, w), w);
  r.timing("pod", seconds_since(t0));
  t0 = Clock::now();
  const auto model = assemble_reduced(basis.modes, r.fields.grid, r.fields.mass, r.fields.assembly,
                                      r.scenario.kinetic);
  r.timing("assemble_reduced", seconds_since(t0));

  const int nx = r.fields.grid.nx(), ny = r.fields.grid.ny();
  Eigen::VectorXd energies(snaps.count());
  for (Eigen::Index s = 0; s < snaps.count(); ++s) energies[s] = snaps.meta[s].energy;
  t0 = Clock::now();
  io::write_qwf1(r.out / "snapshots.qwf", nx, ny, energies, snaps.columns);
  r.artifact("snapshots", r.out / "snapshots.qwf");
  io::write_qwf1(r.out / "basis.qwf", nx, ny, basis.lambdas, basis.modes);
  r.artifact("basis", r.out / "basis.qwf");
  io::write_podh(r.out / "basis.podh", model);
  r.artifact("reduced_model", r.out / "basis.podh");
  write_text(r, "spectrum", "spectrum.csv",
             [&](std::ostream& os) { io::write_spectrum_csv(os, basis.spectrum); });
  const auto names = param_names(r.scenario);
  write_text(r, "snapshot_meta", "snapshots_meta.csv", [&](std::ostream& os) {
    os << "snapshot,config,state,energy_ev";
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    for (Eigen::Index s = 0; s < snaps.count(); ++s) {
      const auto& m = snaps.meta[s];
      os << (s + 1) << ',' << (m.config + 1) << ',' << (m.state + 1) << ','
         << io::format_double(m.energy);
      for (double v : plan.configs[m.config].values) os << ',' << io::format_double(v);
      os << '\n';
    }
  });
  r.timing("write", seconds_since(t0));
  r.manifest["snapshots"] = snaps.count();
  r.manifest["modes"] = basis.size();
  r.manifest["symmetrization_defect"] = model.symmetrization_defect;
  r.write_manifest("train");

  std::printf("%d snapshots from %zu configurations, %d modes kept\n",
              static_cast<int>(snaps.count()), plan.configs.size(), static_cast<int>(basis.size()));
  const Eigen::Index show = std::min<Eigen::Index>(basis.spectrum.size(), 15);
  for (Eigen::Index i = 0; i < show; ++i)
    std::printf("  lambda_%-3d %.4e  (%.3e of lambda_1)\n", static_cast<int>(i + 1),
                basis.spectrum[i], basis.spectrum[i] / basis.spectrum[0]);
  return kOk;
}

int cmd_solve(const Common& c, const std::string& basis_dir, int modes, int states, int coarse) {
  auto r = open_run(c);
  const BasisFiles files{basis_dir.empty() ? r.out : fs::path(basis_dir)};
  const auto params = parse_params(r.scenario, c.params);
  const auto basis = load_basis(r, files);
  const int m = modes > 0 ? modes : r.scenario.solve_modes;
  check_modes(m, basis.states.cols());
  const int n = std::min(states > 0 ? states : r.scenario.dns_states, m);
  const auto model = load_or_assemble(r, files, basis.states);

  auto t0 = Clock::now();
  const auto sol = solve_reduced(evaluate_hamiltonian(model, params, m));
  r.timing("online_solve", seconds_since(t0));
  t0 = Clock::now();
  const auto psi = reconstruct_states(basis.states, sol, n);
  r.timing("reconstruction", seconds_since(t0));

  const Eigen::VectorXd e = sol.energies.head(n);
  write_text(r, "energies", "solve_energies.csv",
             [&](std::ostream& os) { io::write_energies_csv(os, e); });
  write_text(r, "coefficients", "solve_coefficients.csv",
             [&](std::ostream& os) { io::write_coefficients_csv(os, sol, n); });
  io::write_qwf1(r.out / "solve_states.qwf", r.fields.grid.nx(), r.fields.grid.ny(), e, psi);
  r.artifact("wavefunctions", r.out / "solve_states.qwf");
  if (coarse > 1) {
    t0 = Clock::now();
    const auto cs = reconstruct_coarse(basis.states, r.fields.grid, sol, n, coarse);
    r.timing("reconstruction_coarse", seconds_since(t0));
    io::write_qwf1(r.out / "solve_states_coarse.qwf", cs.nx, cs.ny, e, cs.states);
    r.artifact("wavefunctions_coarse", r.out / "solve_states_coarse.qwf");
  }
  r.manifest["params"] = params_json(r, params);
  r.manifest["modes"] = m;
  r.write_manifest("solve");

  for (int i = 0; i < n; ++i) std::printf("QS%-3d %.6f eV\n", i + 1, sol.energies[i]);
  return kOk;
}

int cmd_sweep(const Common& c, const std::string& basis_dir, const std::string& mode_list,
              const std::string& baseline) {
  auto r = open_run(c);
  if (baseline != "pod" && baseline != "fpw") throw InvalidRequest("baseline must be pod or fpw");
  const auto params = parse_params(r.scenario, c.params);
  const auto mode_counts = parse_mode_list(mode_list);
  const int m_max = *std::max_element(mode_counts.begin(), mode_counts.end());
  const auto& grid = r.fields.grid;

  Eigen::MatrixXd modes;
  ReducedModel model;
  std::optional<Eigen::VectorXd> lambdas;
  auto t0 = Clock::now();
  if (baseline == "fpw") {
    if (!grid.bc().periodic_x() || !grid.bc().periodic_y())
      throw InvalidRequest("the plane-wave baseline needs a doubly periodic scenario");
    auto fpw = generate_fpw_basis(grid, m_max);
    model = assemble_reduced(fpw.modes, grid, r.fields.mass, r.fields.assembly,
                             KineticScheme::Analytic, &fpw.gradients);
    modes = std::move(fpw.modes);
    r.timing("basis", seconds_since(t0));
  } else {
    const BasisFiles files{basis_dir.empty() ? r.out : fs::path(basis_dir)};
    auto basis = load_basis(r, files);
    check_modes(m_max, basis.states.cols());
    model = load_or_assemble(r, files, basis.states);
    // Full spectrum lives in spectrum.csv; retained lambdas give the same
    // ratio up to the truncated (round-off) tail.
    lambdas = basis.scalars;
    modes = std::move(basis.states);
    r.timing("basis", seconds_since(t0));
  }
  for (int m : mode_counts) check_modes(m, modes.cols());

  t0 = Clock::now();
  const auto dns = solve_lowest(
      assemble_hamiltonian(grid, r.fields.mass, assemble_potential(r.fields.assembly, params)),
      r.scenario.dns_states, r.scenario.eigen);
  r.timing("dns", seconds_since(t0));
  t0 = Clock::now();
  const auto table = error_sweep(model, modes, lambdas, params, dns, grid, mode_counts, r.scenario.report);
  r.timing("sweep", seconds_since(t0));

  write_text(r, "errors", "sweep_" + baseline + ".csv",
             [&](std::ostream& os) { write_error_csv(os, table, false); });
  write_text(r, "errors_energy_order", "sweep_" + baseline + "_energy_order.csv",
             [&](std::ostream& os) { write_error_csv(os, table, true); });
  write_text(r, "dns_energies", "sweep_dns_energies.csv",
             [&](std::ostream& os) { io::write_energies_csv(os, dns.energies); });
  r.manifest["params"] = params_json(r, params);
  r.manifest["baseline"] = baseline;
  r.write_manifest("sweep_" + baseline);

  std::printf("%5s", "M");
  for (int s = 0; s < r.scenario.report.report_states; ++s) std::printf("  QS%-4d", s + 1);
  std::printf("  avg(%%)\n");
  for (const auto& row : table.rows) {
    std::printf("%5d", row.modes);
    for (const auto& e : row.states) std::printf("  %6.3f", 100.0 * e.ls);
    if (row.avg_trained) std::printf("  %6.3f", 100.0 * *row.avg_trained);
    std::printf("\n");
  }
  return kOk;
}

int cmd_bench(const Common& c, const std::string& basis_dir, int modes, int repeat, int coarse) {
  auto r = open_run(c);
  const BasisFiles files{basis_dir.empty() ? r.out : fs::path(basis_dir)};
  const auto params = parse_params(r.scenario, c.params);
  const auto basis = load_basis(r, files);
  const int m = modes > 0 ? modes : r.scenario.solve_modes;
  check_modes(m, basis.states.cols());
  const auto model = load_or_assemble(r, files, basis.states);
  const int n = std::min(r.scenario.dns_states, m);
  repeat = std::max(repeat, 1);

  auto t0 = Clock::now();
  const auto h = assemble_hamiltonian(r.fields.grid, r.fields.mass,
                                      assemble_potential(r.fields.assembly, params));
  const double t_dns_assemble = seconds_since(t0);
  t0 = Clock::now();
  const auto dns = solve_lowest(h, r.scenario.dns_states, r.scenario.eigen);
  const double t_dns = seconds_since(t0);

  ReducedSolution sol;
  t0 = Clock::now();
  for (int i = 0; i < repeat; ++i) sol = solve_reduced(evaluate_hamiltonian(model, params, m));
  const double t_rom = seconds_since(t0) / repeat;
  t0 = Clock::now();
  const auto psi = reconstruct_states(basis.states, sol, n);
  const double t_rec = seconds_since(t0);
  double t_rec_coarse = -1.0;
  if (coarse > 1) {
    t0 = Clock::now();
    (void)reconstruct_coarse(basis.states, r.fields.grid, sol, n, coarse);
    t_rec_coarse = seconds_since(t0);
  }

  const auto dofs = h.dofs.unknowns();
  r.timing("dns_assemble", t_dns_assemble);
  r.timing("dns_eigensolve", t_dns);
  r.timing("reduced_solve", t_rom);
  r.timing("reconstruction", t_rec);
  if (coarse > 1) r.timing("reconstruction_coarse", t_rec_coarse);
  r.manifest["ratios"] = {{"dns_over_reduced_solve", t_dns / t_rom},
                          {"dns_over_reduced_total", t_dns / (t_rom + t_rec)},
                          {"dof_ratio", static_cast<double>(dofs) / m}};
  if (coarse > 1) r.manifest["ratios"]["reconstruction_full_over_coarse"] = t_rec / t_rec_coarse;
  r.manifest["params"] = params_json(r, params);
  r.manifest["modes"] = m;
  r.manifest["dns_unknowns"] = dofs;
  r.manifest["repeat"] = repeat;
  r.write_manifest("bench");
  (void)psi;

  std::printf("DNS eigensolve        %.4f s (%lld unknowns, %d states)\n", t_dns,
              static_cast<long long>(dofs), r.scenario.dns_states);
  std::printf("reduced eval+solve    %.3e s (M=%d)\n", t_rom, m);
  std::printf("reconstruction        %.3e s\n", t_rec);
  if (coarse > 1) std::printf("reconstruction /%d    %.3e s\n", coarse, t_rec_coarse);
  std::printf("speed-up (solve)      %.1fx\n", t_dns / t_rom);
  std::printf("speed-up (with recon) %.1fx\n", t_dns / (t_rom + t_rec));
  std::printf("DoF ratio             %.1f\n", static_cast<double>(dofs) / m);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  kernels::configure_threads_from_env();

  CLI::App app{"Reduced-order quantum-dot wavefunction solver"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub, bool with_params) {
    sub->add_option("--scenario", common.scenario, "scenario file")->required();
    sub->add_option("--out", common.out, "output directory (default out/<name>)");
    if (with_params)
      sub->add_option("--params", common.params, "name=value,... or @set (default: all zero)");
  };

  int states = 0, modes = 0, coarse = 1, repeat = 200;
  bool states_csv = false;
  std::string basis_dir, mode_list = "1:20", baseline = "pod";

  auto* dns = app.add_subcommand("dns", "direct solve on the full grid");
  add_common(dns, true);
  dns->add_option("--states", states, "number of states (default dns.states)");
  dns->add_flag("--states-csv", states_csv, "also write x,y,psi CSV");

  auto* train = app.add_subcommand("train", "collect snapshots and build the POD basis");
  add_common(train, false);

  auto* solve = app.add_subcommand("solve", "reduced solve at one parameter point");
  add_common(solve, true);
  solve->add_option("--basis", basis_dir, "directory holding basis.qwf (default --out)");
  solve->add_option("--modes,-M", modes, "number of modes (default solve.modes)");
  solve->add_option("--states", states, "states to report (default dns.states)");
  solve->add_option("--coarse-output", coarse, "also reconstruct on every k-th point")
      ->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "error table against the DNS oracle");
  add_common(sweep, true);
  sweep->add_option("--basis", basis_dir, "directory holding basis.qwf (default --out)");
  sweep->add_option("--modes,-M", mode_list, "mode counts, e.g. 1:20 or 40,225");
  sweep->add_option("--baseline", baseline, "pod or fpw");

  auto* bench = app.add_subcommand("bench", "time DNS against the reduced solve");
  add_common(bench, true);
  bench->add_option("--basis", basis_dir, "directory holding basis.qwf (default --out)");
  bench->add_option("--modes,-M", modes, "number of modes (default solve.modes)");
  bench->add_option("--repeat", repeat, "reduced solves to average over");
  bench->add_option("--coarse-output", coarse, "also time reconstruction on every k-th point")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*dns) return cmd_dns(common, states, states_csv);
    if (*train) return cmd_train(common);
    if (*solve) return cmd_solve(common, basis_dir, modes, states, coarse);
    if (*sweep) return cmd_sweep(common, basis_dir, mode_list, baseline);
    if (*bench) return cmd_bench(common, basis_dir, modes, repeat, coarse);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolver;
  } catch (const InvalidRequest& e) {
    std::cerr << "invalid request: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::out_of_range& e) {
    std::cerr << "invalid request: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid request: " << e.what() << '\n';
    return kInvalid;
  }
  return kUsage;
}
