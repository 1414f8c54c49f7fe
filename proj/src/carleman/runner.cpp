#include "carleman/runner.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "carleman/descent.hpp"
#include "carleman/fieldio.hpp"
#include "carleman/parallel.hpp"
#include "carleman/reconstruct.hpp"
#include "carleman/stencil.hpp"
#include "carleman/verify.hpp"

namespace carleman {

const char* version_string() { return "0.1.0"; }

namespace {

namespace fs = std::filesystem;

struct Setup {
  Geometry geom;
  Grid omega_grid;   // spatial, nt = 1
  Grid qt_grid;      // Omega x [0, T]
  Grid solver_grid;  // enlarged spatial grid for the forward solve
  double support_margin = 0.3;
  std::string dir;
  std::uint64_t seed = 1;
};

std::array<int, kMaxDim> axis_counts(const Config& cfg, int dim) {
  auto v = cfg.get_doubles("grid", "n_x");
  std::array<int, kMaxDim> nx{1, 1, 1};
  require(v.size() == 1 || static_cast<int>(v.size()) == dim, ErrorCode::CONFIG_ERROR,
          "[grid] n_x must have 1 or dim entries");
  for (int a = 0; a < dim; ++a) {
    double raw = v.size() == 1 ? v[0] : v[static_cast<std::size_t>(a)];
    nx[static_cast<std::size_t>(a)] = static_cast<int>(raw);
    require(nx[static_cast<std::size_t>(a)] >= 5, ErrorCode::GRID_TOO_SMALL,
            "[grid] n_x must be >= 5");
  }
  return nx;
}

Setup make_setup(const Config& cfg) {
  Setup s;
  s.geom = geometry_from_config(cfg);
  auto nx = axis_counts(cfg, s.geom.dim());
  int nt = cfg.get_int("grid", "n_t");
  require(nt >= 7, ErrorCode::GRID_TOO_SMALL, "[grid] n_t must be >= 7");
  s.omega_grid = Grid(s.geom.omega(), nx, 0.0, 1);
  s.qt_grid = Grid(s.geom.omega(), nx, s.geom.T(), nt);
  s.support_margin = cfg.get_double("initial", "support_margin", 0.3);
  s.solver_grid = make_enlarged_grid(s.geom, s.omega_grid, s.support_margin);
  s.dir = cfg.get_string("io", "dir");
  s.seed = cfg.get_seed("run", "seed", 1);
  return s;
}

std::string path_in(const Setup& s, const std::string& name) {
  return (fs::path(s.dir) / name).string();
}

MediumSpec make_medium(const Config& cfg, const Geometry& geom, const Grid& grid) {
  std::string family = cfg.get_string("medium", "family", "constant");
  double b = cfg.get_double("medium", "b", 0.5);
  double b_bar = cfg.get_double("medium", "b_bar", 1.0);
  std::unique_ptr<MediumProfile> profile;
  if (family == "constant") {
    profile = make_constant_medium(cfg.get_double("medium", "value", b_bar));
  } else if (family == "bump") {
    FlankBump fb{cfg.get_double("medium", "amp", 0.25), cfg.get_double("medium", "center", 1.8),
                 cfg.get_double("medium", "width", 0.45)};
    profile = make_flank_bump_medium(geom, fb);
  } else if (family == "two_bump") {
    FlankBump b1{cfg.get_double("medium", "amp", 0.2), cfg.get_double("medium", "center", 1.7),
                 cfg.get_double("medium", "width", 0.35)};
    FlankBump b2{cfg.get_double("medium", "amp2", 0.12), cfg.get_double("medium", "center2", 2.4),
                 cfg.get_double("medium", "width2", 0.5)};
    profile = make_two_flank_bump_medium(geom, b1, b2);
  } else {
    fail(ErrorCode::CONFIG_ERROR, "[medium] family must be constant, bump or two_bump");
  }
  MediumSpec spec = sample_medium(*profile, grid, b, b_bar);
  spec.exterior_clearance = cfg.get_double("medium", "exterior_clearance", 1.5);
  spec.exterior_tol = cfg.get_double("medium", "exterior_tol", 1e-3);
  return spec;
}

InitialData make_initial(const Config& cfg, const Geometry& geom, const Grid& solver_grid,
                         const Grid& omega_grid) {
  std::string family = cfg.get_string("initial", "family", "quadratic_plateau");
  if (family == "quadratic_plateau") {
    return make_quadratic_plateau_initial(
        geom, solver_grid, omega_grid, cfg.get_double("initial", "xi", 2.0),
        cfg.get_double("initial", "q0", 1.0), cfg.get_double("initial", "plateau_margin", 0.12),
        cfg.get_double("initial", "support_margin", 0.3));
  }
  if (family == "gaussian") {
    Point center{};
    if (cfg.has("initial", "center")) {
      auto c = cfg.get_doubles("initial", "center");
      for (int a = 0; a < geom.dim(); ++a) center[a] = c[static_cast<std::size_t>(a)];
    }
    return make_gaussian_initial(geom, solver_grid, omega_grid,
                                 cfg.get_double("initial", "amp", 1.0),
                                 cfg.get_double("initial", "sharp", 25.0), center);
  }
  fail(ErrorCode::CONFIG_ERROR, "[initial] family must be quadratic_plateau or gaussian");
}

BasisSpec make_basis_spec(const Config& cfg, int dim) {
  BasisSpec spec;
  spec.degree = cfg.get_int("basis", "degree", 3);
  spec.m = cfg.get_int("basis", "m", 3);
  int k = cfg.get_int("basis", "k", 6);
  for (int a = 0; a < dim; ++a) spec.k_x[static_cast<std::size_t>(a)] = k;
  spec.k_t = cfg.get_int("basis", "k_t", k);
  return spec;
}

void write_manifest(const Setup& s, const Config& cfg, const std::string& subcommand) {
  std::ostringstream os;
  os << "version = " << version_string() << "\n";
  os << "subcommand = " << subcommand << "\n";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(cfg.hash()));
  os << "config_hash = " << buf << "\n";
  os << "seed = " << s.seed << "\n";
  write_text_file(path_in(s, "manifest_" + subcommand + ".txt"), os.str());
}

void check_snapshot(const Setup& s, const Config& cfg) {
  std::string snap_path = path_in(s, "config.snapshot.cfg");
  require(file_exists(snap_path), ErrorCode::IO_ERROR,
          "dataset directory has no config.snapshot.cfg; run synth first");
  Config snap = Config::load(snap_path);
  for (const char* key : {"dim", "omega_lo", "omega_hi", "x0", "eta", "T", "d_level"})
    require(snap.get_string("geometry", key) == cfg.get_string("geometry", key),
            ErrorCode::CONFIG_ERROR,
            std::string("config [geometry] ") + key + " differs from dataset snapshot");
  require(snap.get_string("grid", "n_x") == cfg.get_string("grid", "n_x") &&
              snap.get_string("grid", "n_t") == cfg.get_string("grid", "n_t"),
          ErrorCode::CONFIG_ERROR, "config [grid] differs from dataset snapshot");
}

double noise_delta(const Config& cfg) { return cfg.get_double("noise", "delta", 0.0); }

// ---------------------------------------------------------------- synth ----

void run_synth(const Config& cfg) {
  Setup s = make_setup(cfg);
  fs::create_directories(s.dir);

  MediumSpec medium = make_medium(cfg, s.geom, s.solver_grid);
  InitialData initial = make_initial(cfg, s.geom, s.solver_grid, s.omega_grid);

  int nt = s.qt_grid.nt();
  Field u_full = solve_wave(medium, initial, s.geom, s.solver_grid, nt);
  Field u_qt = restrict_to_omega(u_full, s.geom, s.omega_grid);
  BoundaryRecord record = extract_boundary(u_full, s.geom, s.omega_grid);
  double delta = noise_delta(cfg);
  if (delta > 0.0) record = add_noise(record, delta, derive_seed(s.seed, "synth_noise", 0));

  write_field(path_in(s, "u_qt.fld"), u_qt);
  write_traces(path_in(s, "boundary_s.fld"), record.s, s.geom.dim(), s.qt_grid.ht());
  write_traces(path_in(s, "boundary_p.fld"), record.p, s.geom.dim(), s.qt_grid.ht());

  // Restriction of the analytic medium and initial data to the Omega grid.
  auto off = s.solver_grid.offset_of(s.geom.omega());
  Field c_omega(s.omega_grid), f_omega(s.omega_grid);
  int idx[kMaxDim], bidx[kMaxDim];
  for (std::int64_t sp = 0; sp < s.omega_grid.spatial_nodes(); ++sp) {
    s.omega_grid.decode_spatial(sp, idx);
    for (int a = 0; a < s.geom.dim(); ++a) bidx[a] = idx[a] + off[a];
    std::int64_t sb = s.solver_grid.encode_spatial(bidx);
    c_omega[sp] = medium.c[sb];
    f_omega[sp] = initial.f[sb];
  }
  write_field(path_in(s, "c_omega.fld"), c_omega);
  write_field(path_in(s, "f_omega.fld"), f_omega);
  write_field(path_in(s, "lapf_omega.fld"), initial.lap_f_omega);
  write_field_csv(path_in(s, "c_omega.csv"), c_omega);

  write_text_file(path_in(s, "config.snapshot.cfg"), cfg.canonical());
  write_manifest(s, cfg, "synth");
}

// ----------------------------------------------------------- preprocess ----

struct Preprocessed {
  SecondDerivativeRecord der;
  LiftingField lift;
  double delta_hint = 0.0;
  double layer_width = 0.0;
};

Preprocessed preprocess_in_memory(const Config& cfg, const Setup& s,
                                  const BoundaryRecord& record, double delta_hint) {
  Preprocessed out;
  out.delta_hint = delta_hint;
  out.layer_width = cfg.get_double("preprocess", "layer_width", 0.2);
  double kappa0 = cfg.get_double("preprocess", "kappa0", 1.0);
  out.der = second_time_derivative(record, delta_hint, s.geom.T(), kappa0);
  out.lift = build_lifting(out.der.s_bar, out.der.p_bar, s.geom, s.qt_grid, out.layer_width);
  return out;
}

BoundaryRecord load_record(const Setup& s) {
  BoundaryRecord record;
  record.s = read_traces(path_in(s, "boundary_s.fld"));
  record.p = read_traces(path_in(s, "boundary_p.fld"));
  return record;
}

void run_preprocess(const Config& cfg) {
  Setup s = make_setup(cfg);
  check_snapshot(s, cfg);
  BoundaryRecord record = load_record(s);
  double delta_hint = cfg.has("preprocess", "delta_hint")
                          ? cfg.get_double("preprocess", "delta_hint")
                          : noise_delta(cfg);
  Preprocessed pre = preprocess_in_memory(cfg, s, record, delta_hint);

  write_traces(path_in(s, "s_bar.fld"), pre.der.s_bar, s.geom.dim(), s.qt_grid.ht());
  write_traces(path_in(s, "p_bar.fld"), pre.der.p_bar, s.geom.dim(), s.qt_grid.ht());
  write_field(path_in(s, "F.fld"), pre.lift.F);

  nlohmann::json rep;
  rep["layer_width"] = pre.lift.layer_width;
  rep["max_dirichlet_residual"] = pre.lift.max_dirichlet_residual;
  rep["max_neumann_residual"] = pre.lift.max_neumann_residual;
  rep["delta_hint"] = delta_hint;
  write_text_file(path_in(s, "lifting_report.json"), rep.dump(2) + "\n");
  write_manifest(s, cfg, "preprocess");
}

// ---------------------------------------------------------------- solve ----

struct SolverPieces {
  Setup s;
  TensorBasis basis;
  Field F;
  Field lap_f;
  AdmissibleParams params;
  FunctionalConfig fc;

  SolverPieces(const Config& cfg, Setup setup)
      : s(std::move(setup)),
        basis(s.geom, s.qt_grid, make_basis_spec(cfg, s.geom.dim())),
        F(read_field(path_in(s, "F.fld"), s.geom.omega(), s.geom.T())),
        lap_f(read_field(path_in(s, "lapf_omega.fld"), s.geom.omega(), 0.0)) {
    params.lap_f = lap_f;
    params.F0 = F.time_slice(0);
    params.x0 = s.geom.x0();
    params.b = cfg.get_double("medium", "b", 0.5);
    params.R = cfg.get_double("admissible", "R", 10.0);
    params.interior_margin = cfg.get_double("admissible", "interior_margin", 1e-10);
    fc.lambda = cfg.get_double("functional", "lambda", 2.0);
    fc.m = cfg.get_int("basis", "m", 3);
    fc.c_hat = cfg.get_double("functional", "c_hat", 1.0);
    std::string alpha = cfg.get_string("functional", "alpha", "auto");
    fc.alpha = alpha == "auto" ? FunctionalConfig::alpha_for(fc.lambda, fc.c_hat, s.geom.N())
                               : cfg.get_double("functional", "alpha");
  }
};

// Data-driven interior start: a strictly increasing coefficient profile
// between the bracket bounds, lifted to a time-constant target and projected.
CoeffVector initial_guess(const FunctionalContext& ctx, const Geometry& geom) {
  const TensorBasis& basis = ctx.basis();
  const Grid& og = ctx.params().lap_f.grid();
  const double b = ctx.params().b;

  Point e{};
  double norm = 0.0;
  for (int a = 0; a < geom.dim(); ++a) {
    e[a] = 0.5 * (geom.omega().lo[a] + geom.omega().hi[a]) - geom.x0()[a];
    norm += e[a] * e[a];
  }
  norm = std::sqrt(norm);
  double xi_lo = 1e300, xi_hi = -1e300;
  double x[kMaxDim];
  for (std::int64_t sp = 0; sp < og.spatial_nodes(); ++sp) {
    og.node_point(sp, x);
    double xi = 0.0;
    for (int a = 0; a < geom.dim(); ++a) xi += (x[a] - geom.x0()[a]) * e[a] / norm;
    xi_lo = std::min(xi_lo, xi);
    xi_hi = std::max(xi_hi, xi);
  }

  const double mid = 1.0 + 0.5 * b;
  for (double tilt : {0.3, 0.15, 0.08, 0.04, 0.02, 0.01}) {
    Field target(basis.grid());
    const int nt = basis.grid().nt();
    for (std::int64_t sp = 0; sp < og.spatial_nodes(); ++sp) {
      og.node_point(sp, x);
      double xi = 0.0;
      for (int a = 0; a < geom.dim(); ++a) xi += (x[a] - geom.x0()[a]) * e[a] / norm;
      double r = (xi - xi_lo) / (xi_hi - xi_lo);
      double cg = mid * (1.0 + tilt * (r - 0.5));
      double v0 = ctx.params().lap_f[sp] / cg - ctx.params().F0[sp];
      for (int it = 0; it < nt; ++it) target.at(sp, it) = v0;
    }
    CoeffVector B = project(target, basis);
    if (ctx.membership(B).interior) return B;
  }
  fail(ErrorCode::SAMPLING_FAILED, "could not construct an interior starting point");
}

void write_trace_csv(const std::string& path, const DescentTrace& trace) {
  CsvWriter csv(path, {"iter", "J", "grad_norm", "min_margin", "step_used"});
  for (std::size_t i = 0; i < trace.iterates.size(); ++i) {
    const auto& it = trace.iterates[i];
    csv.row({static_cast<double>(i), it.J, it.grad_norm, it.min_margin, it.step_used});
  }
}

void write_cells_csv(const std::string& path, const PiecewiseConstantCoefficient& pcc, int dim) {
  std::vector<std::string> cols;
  for (int a = 0; a < dim; ++a) cols.push_back("x" + std::to_string(a));
  cols.push_back("c");
  CsvWriter csv(path, cols);
  for (std::size_t j = 0; j < pcc.values.size(); ++j) {
    std::vector<double> row;
    for (int a = 0; a < dim; ++a) row.push_back(pcc.centers[j][static_cast<std::size_t>(a)]);
    row.push_back(pcc.values[j]);
    csv.row(row);
  }
}

void run_solve(const Config& cfg) {
  Setup s = make_setup(cfg);
  check_snapshot(s, cfg);
  SolverPieces sp(cfg, s);
  FunctionalContext ctx(sp.s.geom, sp.basis, sp.F, sp.params, sp.fc);

  CoeffVector B1;
  std::string init = cfg.get_string("descent", "init", "auto");
  if (init == "auto") B1 = initial_guess(ctx, sp.s.geom);
  else B1 = read_coeffs(init, sp.s.geom.dim(), sp.basis.spec());

  DescentConfig dc;
  dc.sigma = cfg.get_double("descent", "sigma", 0.0);
  dc.theta = cfg.get_double("descent", "theta", 1e-8);
  dc.max_iters = cfg.get_int("descent", "max_iters", 20000);
  dc.backtrack_factor = cfg.get_double("descent", "backtrack_factor", 0.5);
  dc.membership_policy = cfg.get_string("descent", "membership_policy", "backtrack") == "reject"
                             ? MembershipPolicy::Reject
                             : MembershipPolicy::Backtrack;
  DescentTrace trace = minimize(ctx, B1, dc);

  write_trace_csv(path_in(s, "trace.csv"), trace);
  const CoeffVector& B = trace.terminal();
  write_coeffs(path_in(s, "B_term.cvec"), B, s.geom.dim(), sp.basis.spec());
  Field w_term = sp.basis.synth(B);
  write_field(path_in(s, "w_term.fld"), w_term);

  RecoveredCoefficient rc = recover_c_pointwise(w_term.time_slice(0), sp.params);
  write_field(path_in(s, "c_pointwise.fld"), rc.c);
  write_field_csv(path_in(s, "c_pointwise.csv"), rc.c);

  SpatialBasis spatial(sp.basis, s.omega_grid);
  Field w0pF0 = w_term.time_slice(0);
  w0pF0 += sp.params.F0;
  FemRecovery fem = assemble_and_solve(w0pF0, sp.lap_f, spatial);
  PiecewiseConstantCoefficient pcc = cell_average(fem.c_tilde, spatial, sp.params.b);
  write_cells_csv(path_in(s, "c_cells.csv"), pcc, s.geom.dim());

  RateEstimate rate;
  if (trace.iterates.size() >= 5) rate = estimate_rate(trace, B);
  std::ostringstream rep;
  rep << "status = " << descent_status_name(trace.status) << "\n"
      << "iterations = " << trace.iterates.size() << "\n"
      << "sigma_nominal = " << trace.sigma_nominal << "\n"
      << "final_J = " << trace.iterates.back().J << "\n"
      << "final_grad_norm = " << trace.iterates.back().grad_norm << "\n"
      << "final_min_margin = " << trace.iterates.back().min_margin << "\n"
      << "boundary_minimizer = " << (trace.boundary_minimizer ? 1 : 0) << "\n"
      << "q_fit = " << rate.q_fit << "\n"
      << "q_fit_residual = " << rate.fit_residual << "\n"
      << "pointwise_clamped_nodes = " << rc.clamped_nodes << "\n"
      << "cell_clamped = " << pcc.clamped_cells << "\n";
  write_text_file(path_in(s, "solve_report.txt"), rep.str());
  write_manifest(s, cfg, "solve");

  if (trace.status == DescentStatus::LeftSet)
    fail(ErrorCode::LEFT_SET, "descent left the admissible set; artifacts written");
  bool require_converged = cfg.get_int("descent", "require_converged", 1) != 0;
  if (require_converged && trace.status != DescentStatus::Converged)
    fail(ErrorCode::NOT_CONVERGED, "gradient norm did not reach theta; artifacts written");
}

// ------------------------------------------------------------ reconstruct --

void run_reconstruct(const Config& cfg) {
  Setup s = make_setup(cfg);
  check_snapshot(s, cfg);
  SolverPieces sp(cfg, s);
  std::string wpath = cfg.get_string("reconstruct", "w_field", path_in(s, "w_term.fld"));
  Field w = read_field(wpath, s.geom.omega(), s.geom.T());

  Field w0 = w.time_slice(0);
  RecoveredCoefficient rc = recover_c_pointwise(w0, sp.params);
  write_field(path_in(s, "c_pointwise.fld"), rc.c);
  write_field_csv(path_in(s, "c_pointwise.csv"), rc.c);

  SpatialBasis spatial(sp.basis, s.omega_grid);
  Field w0pF0 = w0;
  w0pF0 += sp.params.F0;
  FemRecovery fem = assemble_and_solve(w0pF0, sp.lap_f, spatial);
  PiecewiseConstantCoefficient pcc = cell_average(fem.c_tilde, spatial, sp.params.b);
  write_cells_csv(path_in(s, "c_cells.csv"), pcc, s.geom.dim());

  // Cross-check of the two recovery routes over the core region (outside the
  // lifting layer, where F vanishes).
  double layer = cfg.get_double("preprocess", "layer_width", 0.2);
  double max_diff = 0.0;
  double x[kMaxDim];
  for (std::int64_t sp_i = 0; sp_i < s.omega_grid.spatial_nodes(); ++sp_i) {
    s.omega_grid.node_point(sp_i, x);
    bool core = true;
    for (int a = 0; a < s.geom.dim(); ++a) {
      if (x[a] - s.geom.omega().lo[a] < layer || s.geom.omega().hi[a] - x[a] < layer)
        core = false;
    }
    if (!core) continue;
    double fem_c = pcc_value(pcc, spatial, x);
    max_diff = std::max(max_diff, std::abs(fem_c - rc.c[sp_i]));
  }
  std::ostringstream rep;
  rep << "pointwise_clamped_nodes = " << rc.clamped_nodes << "\n"
      << "cell_clamped = " << pcc.clamped_cells << "\n"
      << "core_route_max_diff = " << max_diff << "\n";
  write_text_file(path_in(s, "reconstruct_report.txt"), rep.str());
  write_manifest(s, cfg, "reconstruct");
}

// ---------------------------------------------------------------- verify ---

void append_certificate(const Setup& s, const CertificateReport& rep, std::string& summary) {
  CsvWriter csv(path_in(s, "cert_" + rep.property + ".csv"), rep.columns);
  for (const auto& r : rep.rows) csv.row(r);
  summary += rep.summary;
  summary += rep.pass ? "  -> PASS\n" : "  -> FAIL\n";
}

void run_verify(const Config& cfg) {
  Setup s = make_setup(cfg);
  check_snapshot(s, cfg);
  SolverPieces sp(cfg, s);
  std::string property = cfg.get_string("verify", "property", "all");
  int samples = cfg.get_int("verify", "samples", 100);
  std::uint64_t seed = cfg.get_seed("verify", "seed", s.seed);
  std::vector<double> lambda_grid = cfg.get_doubles("verify", "lambda_grid", {0, 1, 2, 4, 8});

  std::string summary;
  bool all_pass = true;

  auto want = [&](const char* name) { return property == "all" || property == name; };

  if (want("strong_convexity") || want("set_convexity")) {
    FunctionalContext ctx(s.geom, sp.basis, sp.F, sp.params, sp.fc);
    Field u_qt = read_field(path_in(s, "u_qt.fld"), s.geom.omega(), s.geom.T());
    Field w_star = dtt(u_qt);
    w_star -= sp.F;
    CoeffVector B_ref = project(w_star, sp.basis);
    require(ctx.membership(B_ref).interior, ErrorCode::SAMPLING_FAILED,
            "projected ground truth is not an interior point of the admissible set");
    if (want("strong_convexity")) {
      CertificateReport rep = certify_strong_convexity(ctx, B_ref, lambda_grid, samples, seed);
      append_certificate(s, rep, summary);
      all_pass = all_pass && rep.pass;
    }
    if (want("set_convexity")) {
      CertificateReport rep = certify_set_convexity(ctx, B_ref, samples, seed);
      append_certificate(s, rep, summary);
      all_pass = all_pass && rep.pass;
    }
  }

  if (want("volterra")) {
    std::vector<double> grid = cfg.get_doubles("verify", "volterra_lambda_grid", {2, 4, 8, 16});
    CertificateReport rep = certify_volterra(s.geom, s.qt_grid, grid,
                                             cfg.get_int("verify", "volterra_samples", 20), seed);
    append_certificate(s, rep, summary);
    all_pass = all_pass && rep.pass;
  }

  if (want("carleman")) {
    Field c_omega = read_field(path_in(s, "c_omega.fld"), s.geom.omega(), 0.0);
    CertificateReport rep = probe_carleman(s.geom, s.qt_grid, &c_omega, nullptr, lambda_grid,
                                           cfg.get_int("verify", "carleman_samples", 10), seed);
    append_certificate(s, rep, summary);
    all_pass = all_pass && rep.pass;
  }

  if (want("noise_scaling")) {
    require(noise_delta(cfg) == 0.0, ErrorCode::CONFIG_ERROR,
            "noise_scaling needs a clean dataset ([noise] delta = 0)");
    Field u_qt = read_field(path_in(s, "u_qt.fld"), s.geom.omega(), s.geom.T());
    Field w_star = dtt(u_qt);
    w_star -= sp.F;
    BoundaryRecord clean = load_record(s);

    NoiseScalingInputs in;
    in.geom = &s.geom;
    in.basis = &sp.basis;
    in.clean_record = &clean;
    in.lap_f = sp.lap_f;
    in.w_star = w_star;
    in.b = sp.params.b;
    in.R = sp.params.R;
    in.c_hat = sp.fc.c_hat;
    in.layer_width = cfg.get_double("preprocess", "layer_width", 0.2);
    in.kappa0 = cfg.get_double("preprocess", "kappa0", 1.0);
    in.m = sp.fc.m;
    in.theta = cfg.get_double("experiment", "theta", 1e-7);
    in.max_iters = cfg.get_int("experiment", "max_iters", 4000);
    in.seed = seed;
    {
      FunctionalContext ctx(s.geom, sp.basis, sp.F, sp.params, sp.fc);
      in.B_init = initial_guess(ctx, s.geom);
    }
    std::vector<double> deltas =
        cfg.get_doubles("experiment", "deltas", {0.08, 0.04, 0.02, 0.01});
    CertificateReport rep = experiment_noise_scaling(in, deltas);
    append_certificate(s, rep, summary);
    all_pass = all_pass && rep.pass;
  }

  write_text_file(path_in(s, "verify_summary.txt"), summary);
  write_manifest(s, cfg, "verify");
  std::fputs(summary.c_str(), stdout);
  require(all_pass, ErrorCode::NOT_CONVERGED, "one or more certificates failed");
}

// -------------------------------------------------------------- experiment -

void run_experiment(const Config& cfg) {
  Setup s = make_setup(cfg);
  check_snapshot(s, cfg);
  SolverPieces sp(cfg, s);
  std::string mode = cfg.get_string("experiment", "mode", "noise");
  require(noise_delta(cfg) == 0.0, ErrorCode::CONFIG_ERROR,
          "experiments need a clean dataset ([noise] delta = 0)");

  Field u_qt = read_field(path_in(s, "u_qt.fld"), s.geom.omega(), s.geom.T());
  Field w_star = dtt(u_qt);
  w_star -= sp.F;
  BoundaryRecord clean = load_record(s);

  NoiseScalingInputs in;
  in.geom = &s.geom;
  in.basis = &sp.basis;
  in.clean_record = &clean;
  in.lap_f = sp.lap_f;
  in.w_star = w_star;
  in.b = sp.params.b;
  in.R = sp.params.R;
  in.c_hat = sp.fc.c_hat;
  in.layer_width = cfg.get_double("preprocess", "layer_width", 0.2);
  in.kappa0 = cfg.get_double("preprocess", "kappa0", 1.0);
  in.m = sp.fc.m;
  in.theta = cfg.get_double("experiment", "theta", 1e-7);
  in.max_iters = cfg.get_int("experiment", "max_iters", 4000);
  in.seed = cfg.get_seed("verify", "seed", s.seed);
  {
    FunctionalContext ctx(s.geom, sp.basis, sp.F, sp.params, sp.fc);
    in.B_init = initial_guess(ctx, s.geom);
  }

  CertificateReport rep;
  if (mode == "noise") {
    rep = experiment_noise_scaling(in, cfg.get_doubles("experiment", "deltas",
                                                       {0.08, 0.04, 0.02, 0.01}));
  } else if (mode == "lambda") {
    in.lambda_sweep = true;
    in.lambda_grid = cfg.get_doubles("experiment", "lambdas", {1, 2, 4, 8});
    rep = experiment_noise_scaling(in, {});
  } else {
    fail(ErrorCode::CONFIG_ERROR, "[experiment] mode must be noise or lambda");
  }

  CsvWriter csv(path_in(s, "experiment.csv"), rep.columns);
  for (const auto& r : rep.rows) csv.row(r);
  write_text_file(path_in(s, "experiment_summary.txt"), rep.summary);
  write_manifest(s, cfg, "experiment");
  std::fputs(rep.summary.c_str(), stdout);
}

}  // namespace

void run_subcommand(const std::string& name, Config& cfg) {
  int threads = cfg.get_int("run", "threads", 0);
  if (threads <= 0) {
    if (const char* env = std::getenv("CARLEMAN_THREADS")) threads = std::atoi(env);
  }
  if (threads > 0) set_threads(threads);

  if (name == "synth") run_synth(cfg);
  else if (name == "preprocess") run_preprocess(cfg);
  else if (name == "solve") run_solve(cfg);
  else if (name == "reconstruct") run_reconstruct(cfg);
  else if (name == "verify") run_verify(cfg);
  else if (name == "experiment") run_experiment(cfg);
  else fail(ErrorCode::CONFIG_ERROR, "unknown subcommand '" + name + "'");
}

}  // namespace carleman
