// maup: scenario runner for the conformal-metric toolkit. Every subcommand reads
// one block of a JSON scenario, writes its tables as CSV plus a JSON summary with
// one pass/fail entry per in-scenario tolerance, and exits 0 iff all of them hold.
#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "maupertuis/validate.hpp"

namespace {

using namespace maup;

struct run_setup {
  std::filesystem::path out_dir;
  std::string scenario_name;
  int threads = 1;
};

std::filesystem::path resolve_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("MAUPERTUIS_OUT"); env && *env) return env;
  return ".";
}

double term_at(const density_breakdown& b, std::size_t k) {
  return k < b.terms.size() ? b.terms[k] : 0.0;
}

std::vector<criterion_result> run_geometry(const scenario_node& root, const run_setup& rs) {
  scenario_node blk = root.child("geometry");
  potential pot = make_potential(blk.child("potential"));
  const double energy = blk.number("energy");
  const int count = blk.integer_or("points", 100);
  const double box = blk.number_or("box", 2.0);
  const double tol = blk.number_or("tolerance", 1e-4);
  std::mt19937_64 g(static_cast<unsigned long long>(blk.integer_or("seed", 1)));
  std::uniform_real_distribution<double> u(-box, box);
  const int d = pot.dim();
  maupertuis_field field(pot, energy);
  csv_writer csv;
  std::vector<std::string> head;
  for (int i = 0; i < d; ++i) head.push_back("x" + std::to_string(i));
  head.insert(head.end(), {"r_closed_form", "r_finite_difference", "rel_gap"});
  csv.row(head);
  double worst = 0.0;
  int kept = 0;
  while (kept < count) {
    vecd x(d);
    for (double& v : x) v = u(g);
    if (field.omega2(x) <= 1e-3) continue;  // closed form lives on the V > E side
    const double ra = ricci_scalar_analytic(pot, energy, x);
    const double rf = ricci_scalar_fd(field, x);
    const double gap = std::fabs(ra - rf) / (1.0 + std::fabs(ra));
    worst = std::max(worst, gap);
    std::vector<std::string> row;
    for (double v : x) row.push_back(fmt17(v));
    row.insert(row.end(), {fmt17(ra), fmt17(rf), fmt17(gap)});
    csv.row(row);
    ++kept;
  }
  write_text_file(rs.out_dir / "geometry.csv", csv.str());
  return {{1, "curvature closed form vs finite-difference assembly", worst, tol, worst <= tol}};
}

std::vector<criterion_result> run_geodesic(const scenario_node& root, const run_setup& rs) {
  scenario_node blk = root.child("geodesic");
  potential pot = make_potential(blk.child("potential"));
  const vecd x0 = blk.numbers("x0");
  const vecd v0 = blk.numbers("v0");
  const double t_end = blk.number("t_end");
  const double ode_tol = blk.number_or("ode_tol", 1e-9);
  const int samples = blk.integer_or("samples", 200);
  const double tol = blk.number_or("tolerance", 1e-6);
  comparison_report rep = compare_geodesic_newton(pot, x0, v0, t_end, ode_tol, samples);
  const int d = rep.newton.dim;
  csv_writer csv;
  std::vector<std::string> head{"t", "l"};
  for (int i = 0; i < d; ++i) head.push_back("newton_x" + std::to_string(i));
  for (int i = 0; i < d; ++i) head.push_back("geodesic_x" + std::to_string(i));
  head.push_back("deviation");
  csv.row(head);
  for (const deviation_sample& s : rep.samples) {
    std::vector<std::string> row{fmt17(s.t), fmt17(s.l)};
    for (double v : rep.newton.position_at(s.t)) row.push_back(fmt17(v));
    for (double v : rep.geodesic.position_at(s.l)) row.push_back(fmt17(v));
    row.push_back(fmt17(s.deviation));
    csv.row(row);
  }
  write_text_file(rs.out_dir / "geodesic.csv", csv.str());
  std::printf("energy %s, invariant length %s, samples %zu\n", fmt17(rep.energy).c_str(),
              fmt17(rep.l_total).c_str(), rep.samples.size());
  return {{1, "geodesic matches Newton after dl = 2|E-V| dt", rep.max_deviation, tol,
           rep.max_deviation <= tol}};
}

std::vector<criterion_result> run_dewitt(const scenario_node& root, const run_setup& rs) {
  scenario_node blk = root.child("dewitt");
  const int dim = blk.integer_or("dim", 3);
  const double pe = blk.number_or("p_e", 1.0);
  const vecd point = blk.numbers("point");
  const vecd xis = blk.numbers("xi_values");
  const double tol = blk.number_or("conformal_value_tolerance", 1e-6);
  hydrogen_momentum_field field(dim, pe);
  curvature_pack pack = curvature_invariants(field, point);
  csv_writer csv;
  csv.row({"xi", "a1", "a2"});
  for (double xi : xis)
    csv.row({fmt17(xi), fmt17(coefficient_a1(pack.r, xi)), fmt17(coefficient_a2(pack, xi))});
  write_text_file(rs.out_dir / "dewitt.csv", csv.str());
  const double a2c = std::fabs(coefficient_a2(pack, 1.0 / 6.0));
  return {{1, "a2 vanishes at xi = 1/6 on the constant-curvature field", a2c, tol, a2c <= tol}};
}

std::vector<criterion_result> run_density(const scenario_node& root, const run_setup& rs) {
  scenario_node blk = root.child("density");
  potential pot = make_potential(blk.child("potential"));
  const double energy = blk.number("energy");
  const int order = blk.integer_or("order", 2);
  const double ptol = blk.number_or("pipeline_tolerance", 1e-12);
  scenario_node sweep = blk.child("sweep");
  const vecd start = sweep.numbers("start");
  const vecd stop = sweep.numbers("stop");
  const int count = sweep.integer("count");
  const int d = pot.dim();
  if (static_cast<int>(start.size()) != d || static_cast<int>(stop.size()) != d)
    throw config_error("sweep endpoints must match the potential dimension at " + sweep.path());
  if (count < 2) throw config_error("expected count >= 2 at " + sweep.path() + "/count");
  csv_writer csv;
  std::vector<std::string> head;
  for (int i = 0; i < d; ++i) head.push_back("x" + std::to_string(i));
  head.insert(head.end(), {"E", "term0", "term1", "term2", "total", "regime"});
  csv.row(head);
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    vecd x(d);
    const double f = static_cast<double>(k) / (count - 1);
    for (int i = 0; i < d; ++i) x[i] = start[i] + f * (stop[i] - start[i]);
    std::vector<std::string> row;
    for (double v : x) row.push_back(fmt17(v));
    row.push_back(fmt17(energy));
    try {
      density_breakdown a = semiclassical_density(pot, energy, x, order);
      density_breakdown b = density_from_resolvent(pot, energy, x, order);
      for (std::size_t t = 0; t < a.terms.size(); ++t)
        worst = std::max(worst, detail::rel_diff(a.terms[t], b.terms[t]));
      row.insert(row.end(), {fmt17(term_at(a, 0)), fmt17(term_at(a, 1)), fmt17(term_at(a, 2)),
                             fmt17(a.total), regime_name(a.regime)});
    } catch (const forbidden_region_error&) {
      row.insert(row.end(), {"0", "0", "0", "0", regime_name(density_regime::forbidden)});
    }
    csv.row(row);
  }
  write_text_file(rs.out_dir / "density.csv", csv.str());
  return {{1, "continuation route matches direct density per term", worst, ptol, worst <= ptol}};
}

std::vector<criterion_result> run_oracle(const scenario_node& root, const run_setup& rs) {
  scenario_node blk = root.child("oracle");
  potential pot = make_potential(blk.child("potential"));
  scenario_node gn = blk.child("grid");
  grid_spec grid{gn.number_or("x_min", -12.0), gn.number_or("x_max", 12.0),
                 gn.integer_or("n", 4000)};
  const int n_states = blk.integer_or("n_states", 32);
  const double leak = blk.number_or("leak_tol", 1e-8);
  spectral_data sd = solve_1d(pot, grid, n_states, leak);
  vecd refined = eigenvalues_refined(pot, grid, n_states, leak);
  csv_writer levels;
  levels.row({"n", "energy", "energy_refined"});
  double worst = 0.0;
  for (int s = 0; s < sd.retained(); ++s) {
    levels.row({std::to_string(s), fmt17(sd.eigenvalues[s]), fmt17(refined[s])});
    worst = std::max(worst, std::fabs(sd.eigenvalues[s] - refined[s]) /
                                (1.0 + std::fabs(refined[s])));
  }
  write_text_file(rs.out_dir / "oracle_levels.csv", levels.str());
  const double eta = blk.number_or("eta", 2.0);
  csv_writer dos;
  dos.row({"energy", "smeared_dos"});
  for (double e : blk.numbers("dos_energies")) dos.row({fmt17(e), fmt17(dos_smeared(sd, e, eta))});
  write_text_file(rs.out_dir / "oracle_dos.csv", dos.str());
  const double tol = blk.number_or("refinement_gap_tolerance", 1e-2);
  return {{1, "grid-halving refinement shifts no level beyond tolerance", worst, tol,
           worst <= tol}};
}

std::vector<criterion_result> run_compare(const scenario_node& root, const run_setup& rs) {
  scenario_node blk = root.child("compare");
  potential pot = make_potential(blk.child("potential"));
  scenario_node gn = blk.child("grid");
  grid_spec grid{gn.number_or("x_min", -12.0), gn.number_or("x_max", 12.0),
                 gn.integer_or("n", 4000)};
  const int n_states = blk.integer_or("n_states", 32);
  const double energy = blk.number("energy");
  const double eta = blk.number_or("eta", 2.0);
  const double fraction = blk.number_or("window_fraction", 0.7);
  const int points = blk.integer_or("points", 29);
  const double ptol = blk.number_or("pointwise_tolerance", 0.05);
  spectral_data sd = solve_1d(pot, grid, n_states, blk.number_or("leak_tol", 1e-8));
  dos_breakdown turning = integrated_dos(pot, energy, 0);
  const double lo = fraction * turning.x_left, hi = fraction * turning.x_right;
  csv_writer csv;
  csv.row({"x", "exact", "leading", "corrected", "leading_rel_gap"});
  double worst = 0.0, l2_lead = 0.0, l2_full = 0.0;
  for (int j = 0; j < points; ++j) {
    const double x = lo + (hi - lo) * j / (points - 1);
    const double exact = local_density_smeared(sd, x, energy, eta);
    const vecd t = smeared_semiclassical_terms(pot, x, energy, eta, 2);
    const double lead = t[0];
    const double full = t[0] + t[1] + t[2];
    const double gap = std::fabs(lead / exact - 1.0);
    worst = std::max(worst, gap);
    l2_lead += (lead - exact) * (lead - exact);
    l2_full += (full - exact) * (full - exact);
    csv.row({fmt17(x), fmt17(exact), fmt17(lead), fmt17(full), fmt17(gap)});
  }
  write_text_file(rs.out_dir / "compare.csv", csv.str());
  const double ratio = std::sqrt(l2_full / l2_lead);
  return {{1, "smeared leading order within pointwise tolerance", worst, ptol, worst <= ptol},
          {2, "corrections do not increase the masked L2 residual", ratio, 1.0 + 1e-9,
           ratio <= 1.0 + 1e-9}};
}

std::vector<criterion_result> run_hydrogen(const scenario_node& root, const run_setup& rs) {
  scenario_node blk = root.child("hydrogen");
  const int dim = blk.integer_or("dim", 3);
  const double pe = blk.number_or("p_e", 1.0);
  const double tol = blk.number_or("fd_tolerance", 1e-5);
  hydrogen_report rep = hydrogen_momentum_case(dim, pe);
  std::mt19937_64 g(static_cast<unsigned long long>(blk.integer_or("seed", 3)));
  std::uniform_real_distribution<double> u(-1.5 * pe, 1.5 * pe);
  double worst = 0.0;
  for (int k = 0; k < blk.integer_or("points", 20); ++k) {
    vecd p(dim);
    for (double& v : p) v = u(g);
    worst = std::max(worst, std::fabs(ricci_scalar_fd(rep.field, p) - rep.r) / rep.r);
  }
  std::printf("momentum-space metric, D = %d, p_E = %s\n", dim, fmt17(pe).c_str());
  std::printf("scalar curvature R = %s, constant, equal to 2 D (D-1) p_E^2\n",
              fmt17(rep.r).c_str());
  std::printf("subtraction used: xi = 1/(2 D (D-1)) so xi R = %s\n",
              fmt17(rep.subtraction_used).c_str());
  std::printf("Weyl-covariant choice would subtract (D-2) R/(8 (D-1)) = %s%s\n",
              fmt17(rep.subtraction_weyl).c_str(), dim == 3 ? " (that is R/16)" : "");
  csv_writer csv;
  csv.row({"dim", "p_e", "r", "xi_used", "subtraction_used", "xi_weyl", "subtraction_weyl",
           "fd_worst_rel_gap"});
  csv.row({std::to_string(rep.dim), fmt17(rep.p_e), fmt17(rep.r), fmt17(rep.xi_used),
           fmt17(rep.subtraction_used), fmt17(rep.xi_weyl), fmt17(rep.subtraction_weyl),
           fmt17(worst)});
  write_text_file(rs.out_dir / "hydrogen.csv", csv.str());
  return {{1, "finite-difference curvature matches 2D(D-1)p_E^2", worst, tol, worst <= tol}};
}

std::vector<criterion_result> run_validate(const scenario_node& root, const run_setup& rs) {
  std::vector<int> ids;
  if (root.has("validate")) {
    scenario_node blk = root.child("validate");
    if (blk.has("ids")) {
      for (double v : blk.numbers("ids")) {
        const int id = static_cast<int>(v);
        if (id < 1 || id > 12)
          throw config_error("criterion ids must lie in 1..12 at " + blk.path() +
                             "/ids (13, the rerun check, runs only with the full suite)");
        ids.push_back(id);
      }
    }
  }
  return ids.empty() ? run_all_criteria(rs.threads) : run_criteria(ids, rs.threads);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conformal-metric toolkit scenario runner"};
  app.require_subcommand(1);
  std::string scenario_file, out_flag;
  int threads = 1;
  const char* names[] = {"geometry", "geodesic", "dewitt",   "density",
                         "oracle",   "compare",  "hydrogen", "validate"};
  const char* descs[] = {"curvature two-path tables",
                         "trajectory and deviation report",
                         "heat-kernel coefficient tables",
                         "density breakdown sweep",
                         "spectra and smeared densities",
                         "density vs spectrum residual report",
                         "momentum-space constant-curvature report",
                         "full invariant suite"};
  for (int i = 0; i < 8; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descs[i]);
    sub->add_option("--scenario", scenario_file, "scenario JSON file")->required();
    sub->add_option("--out", out_flag, "output directory (fallback: MAUPERTUIS_OUT, then .)");
    sub->add_option("--threads", threads, "worker threads for independent checks");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string sub = app.get_subcommands()[0]->get_name();
  try {
    nlohmann::json j = maup::load_scenario_file(scenario_file);
    maup::scenario_node root(j, "");
    run_setup rs{resolve_out_dir(out_flag), root.text_or("name", "unnamed"), threads};
    std::vector<maup::criterion_result> crits;
    if (sub == "geometry") crits = run_geometry(root, rs);
    else if (sub == "geodesic") crits = run_geodesic(root, rs);
    else if (sub == "dewitt") crits = run_dewitt(root, rs);
    else if (sub == "density") crits = run_density(root, rs);
    else if (sub == "oracle") crits = run_oracle(root, rs);
    else if (sub == "compare") crits = run_compare(root, rs);
    else if (sub == "hydrogen") crits = run_hydrogen(root, rs);
    else crits = run_validate(root, rs);
    maup::write_text_file(rs.out_dir / (sub + "_summary.json"),
                          maup::summary_to_string(rs.scenario_name, crits));
    maup::write_text_file(rs.out_dir / (sub + "_criteria.csv"), maup::criteria_to_csv(crits));
    bool all = true;
    for (const maup::criterion_result& c : crits) {
      std::printf("criterion %02d %s %s value=%s tolerance=%s\n", c.id,
                  c.pass ? "pass" : "FAIL", c.name.c_str(), maup::fmt17(c.value).c_str(),
                  maup::fmt17(c.tolerance).c_str());
      all = all && c.pass;
    }
    std::printf("result %s\n", all ? "pass" : "FAIL");
    return all ? 0 : 1;
  } catch (const maup::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
