// Command-line front end: orbits, itineraries, condition checks, parameter
// sweeps, interval refinement, measure trends, and the verification battery
// for the circle family x ↦ x + a + L·ln|Φ(x)|.
//
// Exit codes: 0 success, 1 verification failure, 2 config/validation error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "logmap/verify.hpp"

namespace {

struct Options {
  std::string phi = "sin2pi";
  double L = 1e4;
  std::string profile = "desk";
  std::string profile_file;
  double a = 0.5;
  double x0 = 0.5;
  std::size_t n = 200;
  std::size_t M = 1000;
  std::vector<double> Ls;
  std::uint64_t seed = 0;
  std::string out;     // empty = stdout
  std::string format;  // empty = command default
  int threads = 0;
  std::size_t critical = 0;
  std::optional<double> radius;
  int depth = 8;
  double width_min = 1e-12;
  std::optional<double> ov_lambda, ov_alpha, ov_sigma_exp;
  std::optional<long long> ov_N;
  bool artifacts_only = false;
  std::vector<int> only;
};

// Config file keys mirror the long flags; explicit flags win over the file.
template <typename T>
void from_config(const nlohmann::json& j, const CLI::App& app,
                 const std::string& key, const std::string& flag, T& target) {
  if (!j.contains(key)) return;
  const CLI::Option* opt = app.get_option_no_throw(flag);
  if (opt != nullptr && opt->count() > 0) return;
  target = j.at(key).get<T>();
}

template <typename T>
void from_config_opt(const nlohmann::json& j, const CLI::App& app,
                     const std::string& key, const std::string& flag,
                     std::optional<T>& target) {
  if (!j.contains(key)) return;
  const CLI::Option* opt = app.get_option_no_throw(flag);
  if (opt != nullptr && opt->count() > 0) return;
  target = j.at(key).get<T>();
}

logmap::ConstantsProfile resolve_profile(const Options& o) {
  logmap::ConstantsProfile pr;
  if (o.profile == "paper") {
    pr = logmap::paper_profile();
  } else if (o.profile == "desk") {
    pr = logmap::desk_profile();
  } else if (o.profile == "appendix") {
    pr = logmap::appendix_profile();
  } else if (o.profile == "file") {
    if (o.profile_file.empty())
      throw std::invalid_argument("--profile file needs --profile-file");
    std::ifstream in(o.profile_file);
    if (!in) throw std::invalid_argument("cannot read " + o.profile_file);
    const nlohmann::json j = nlohmann::json::parse(in);
    pr.name = j.value("name", std::string("file"));
    pr.lambda = j.value("lambda", pr.lambda);
    pr.alpha = j.value("alpha", pr.alpha);
    pr.N = j.value("N", pr.N);
    pr.sigma_exp = j.value("sigma_exp", pr.sigma_exp);
  } else {
    throw std::invalid_argument("unknown profile " + o.profile);
  }
  const bool overridden =
      o.ov_lambda || o.ov_alpha || o.ov_N || o.ov_sigma_exp;
  if (o.ov_lambda) pr.lambda = *o.ov_lambda;
  if (o.ov_alpha) pr.alpha = *o.ov_alpha;
  if (o.ov_N) pr.N = *o.ov_N;
  if (o.ov_sigma_exp) pr.sigma_exp = *o.ov_sigma_exp;
  if (overridden && o.profile != "file") pr.name += "+overrides";
  const logmap::ProfileCheck chk = logmap::validate_profile(pr, o.L);
  if (!chk.ok) throw std::invalid_argument(chk.reason);
  return pr;
}

logmap::PhiSpec resolve_phi(const Options& o) {
  const logmap::PhiSpec phi = logmap::make_phi(o.phi);
  const logmap::PhiAdmissibility adm = logmap::check_phi_admissible(phi);
  if (!adm.ok()) {
    std::string why;
    if (!adm.periodic)
      why = "period defect " + std::to_string(adm.max_period_defect);
    else
      why = "derivative mismatch " +
            std::to_string(std::max(adm.max_d1_rel_err, adm.max_d2_rel_err));
    throw std::invalid_argument("phi '" + o.phi + "' inadmissible: " + why);
  }
  return phi;
}

// Picks csv/json, falling back to the command's natural format. Commands
// without a tabular form reject an explicit csv request.
std::string pick_format(const Options& o, const char* def, bool has_csv) {
  const std::string f = o.format.empty() ? def : o.format;
  if (f == "csv" && !has_csv)
    throw std::invalid_argument("this command has no csv form; use json");
  return f;
}

std::string replace_extension(const std::string& path, const char* ext) {
  namespace fs = std::filesystem;
  fs::path p(path);
  p.replace_extension(ext);
  return p.string();
}

int cmd_roots(const Options& o) {
  const logmap::PhiSpec phi = resolve_phi(o);
  const logmap::StructureSets st = logmap::build_structure(phi, o.L);
  const logmap::BracketFit fit = logmap::fit_derivative_constant(
      phi, {o.L}, 4096, 2000, logmap::derive_seed(o.seed, 1));
  nlohmann::ordered_json j = logmap::io::roots_json(phi, o.L, st, &fit);
  j["seed"] = o.seed;
  logmap::io::write_text(o.out, logmap::io::dump_json(j));
  return 0;
}

int cmd_orbit(const Options& o) {
  const logmap::PhiSpec phi = resolve_phi(o);
  const logmap::StructureSets st = logmap::build_structure(phi, o.L);
  const logmap::MapParams p{o.a, o.L, phi};
  const logmap::OrbitRecord rec = logmap::iterate_orbit(p, st, o.x0, o.n);
  const std::string f = pick_format(o, "csv", true);
  if (f == "csv") {
    logmap::io::write_text(o.out, logmap::io::orbit_csv(rec));
  } else {
    nlohmann::ordered_json j;
    j["phi"] = phi.name;
    j["L"] = o.L;
    j["a"] = o.a;
    j["x0"] = o.x0;
    j["orbit"] = logmap::io::orbit_json(rec);
    logmap::io::write_text(o.out, logmap::io::dump_json(j));
  }
  return 0;
}

int cmd_itinerary(const Options& o, const logmap::ConstantsProfile& pr) {
  const logmap::PhiSpec phi = resolve_phi(o);
  const logmap::StructureSets st = logmap::build_structure(phi, o.L);
  if (o.critical >= st.C.points.size())
    throw std::invalid_argument("critical index out of range; the family has " +
                                std::to_string(st.C.points.size()) +
                                " critical points");
  const logmap::MapParams p{o.a, o.L, phi};
  const double radius = o.radius ? *o.radius : pr.delta(o.L);
  logmap::BindingContext ctx(p, st, o.n + 1);
  logmap::Itinerary itin;
  if (const logmap::BindingContext::Entry* e = ctx.get(o.critical)) {
    itin = logmap::build_itinerary(e->rec, radius, ctx, o.critical);
    logmap::detect_deep_returns(itin, o.L);
  }
  nlohmann::ordered_json j;
  j["phi"] = phi.name;
  j["L"] = o.L;
  j["a"] = o.a;
  j["radius"] = radius;
  j["itinerary"] = logmap::io::itinerary_json(itin);
  logmap::io::write_text(o.out, logmap::io::dump_json(j));
  return 0;
}

int cmd_check(const Options& o, const logmap::ConstantsProfile& pr) {
  const logmap::PhiSpec phi = resolve_phi(o);
  const logmap::StructureSets st = logmap::build_structure(phi, o.L);
  const logmap::MapParams p{o.a, o.L, phi};
  const logmap::ConditionReport rep =
      logmap::evaluate_conditions(p, st, pr, o.n);
  logmap::io::write_text(o.out,
                         logmap::io::dump_json(logmap::io::check_json(p, pr, rep)));
  return 0;
}

int cmd_sweep(const Options& o, const logmap::ConstantsProfile& pr) {
  const logmap::PhiSpec phi = resolve_phi(o);
  const logmap::SweepResult s =
      logmap::grid_sweep(phi, o.L, pr, o.M, o.n, o.threads);
  if (o.out.empty()) {
    const std::string f = pick_format(o, "csv", true);
    if (f == "csv")
      logmap::io::write_text("", logmap::io::sweep_csv(s));
    else
      logmap::io::write_text(
          "", logmap::io::dump_json(logmap::io::sweep_summary_json(s)));
  } else {
    // A sweep always lands as the per-parameter table plus the summary.
    logmap::io::write_text(replace_extension(o.out, ".csv"),
                           logmap::io::sweep_csv(s));
    logmap::io::write_text(
        replace_extension(o.out, ".json"),
        logmap::io::dump_json(logmap::io::sweep_summary_json(s)));
  }
  return 0;
}

int cmd_refine(const Options& o, const logmap::ConstantsProfile& pr) {
  const logmap::PhiSpec phi = resolve_phi(o);
  const std::vector<logmap::IntervalSet> gens =
      logmap::interval_refine(phi, o.L, pr, o.n, o.depth, o.width_min);
  nlohmann::ordered_json j;
  j["phi"] = phi.name;
  j["L"] = o.L;
  j["profile"] = logmap::io::profile_json(pr);
  j["n_max"] = o.n;
  j["depth"] = o.depth;
  j["width_min"] = o.width_min;
  j["generations"] = logmap::io::intervals_json(gens)["generations"];
  logmap::io::write_text(o.out, logmap::io::dump_json(j));
  return 0;
}

int cmd_measure(const Options& o, const logmap::ConstantsProfile& pr) {
  const logmap::PhiSpec phi = resolve_phi(o);
  const std::vector<double> Ls = o.Ls.empty() ? std::vector<double>{1e3, 1e4}
                                              : o.Ls;
  const logmap::TrendStudy t =
      logmap::trend_study(phi, Ls, pr, o.M, o.n, o.threads);
  const std::string f = pick_format(o, "csv", true);
  if (f == "csv")
    logmap::io::write_text(o.out, logmap::io::trend_csv(t));
  else
    logmap::io::write_text(
        o.out, logmap::io::dump_json(logmap::io::trend_json(pr, phi, t)));
  return 0;
}

int cmd_verify(const Options& o) {
  for (int id : o.only)
    if (id < 1 || id > 12)
      throw std::invalid_argument("criterion ids run 1..12");
  logmap::VerifyOptions vo;
  vo.seed = o.seed;
  vo.out_dir = o.out;
  vo.threads = o.threads;
  vo.artifacts_only = o.artifacts_only;
  vo.only = o.only;
  const logmap::VerifyReport rep = logmap::run_verify(vo, std::cout);
  if (o.artifacts_only) return 0;
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Numerical laboratory for circle maps x -> x + a + L*ln|Phi(x)|: "
      "structure sets, orbits, binding itineraries, parameter conditions, "
      "sweeps, and the verification battery."};
  app.require_subcommand(0, 1);

  Options o;
  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON file whose keys mirror the long flags; explicit flags win");
  app.add_option("--phi", o.phi, "family name: sin2pi, sin4pi, or sin2pi+<shift>");
  app.add_option("--L", o.L, "singularity strength (> 0)")
      ->check(CLI::PositiveNumber);
  app.add_option("--profile", o.profile, "constants profile")
      ->check(CLI::IsMember({"paper", "desk", "appendix", "file"}));
  app.add_option("--profile-file", o.profile_file,
                 "JSON profile when --profile file");
  app.add_option("--lambda", o.ov_lambda, "override: expansion rate");
  app.add_option("--alpha", o.ov_alpha, "override: exclusion rate");
  app.add_option("--N", o.ov_N, "override: initial horizon");
  app.add_option("--sigma-exp", o.ov_sigma_exp, "override: sigma exponent");
  app.add_option("--a", o.a, "map parameter");
  app.add_option("--x0", o.x0, "orbit start point");
  app.add_option("--n,--n-max", o.n, "horizon / refinement target depth")
      ->check(CLI::PositiveNumber);
  app.add_option("--M", o.M, "grid resolution")->check(CLI::PositiveNumber);
  app.add_option("--Ls", o.Ls, "increasing L list for measure trends")
      ->delimiter(',');
  app.add_option("--seed", o.seed, "root seed for all randomness");
  app.add_option("--out", o.out, "output path (default stdout)");
  app.add_option("--format", o.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", o.threads, "worker threads (0 = all cores)")
      ->check(CLI::Range(0, 4096));
  app.add_option("--critical", o.critical, "critical point index (itinerary)");
  app.add_option("--radius", o.radius,
                 "return radius (itinerary; default delta of the profile)");
  app.add_option("--depth", o.depth, "refinement depth (refine)")
      ->check(CLI::Range(0, 60));
  app.add_option("--width-min", o.width_min, "refinement width floor (refine)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--artifacts-only", o.artifacts_only,
               "verify: write artifacts and skip the criteria");
  app.add_option("--only", o.only, "verify: run just these criterion ids");

  CLI::App* sub_roots =
      app.add_subcommand("roots", "critical/singular sets and the derivative bracket fit");
  CLI::App* sub_orbit = app.add_subcommand("orbit", "iterate one orbit");
  CLI::App* sub_itin =
      app.add_subcommand("itinerary", "returns and bound periods of a critical orbit");
  CLI::App* sub_check =
      app.add_subcommand("check", "condition report for one parameter");
  CLI::App* sub_sweep =
      app.add_subcommand("sweep", "condition digests over a parameter grid");
  CLI::App* sub_refine =
      app.add_subcommand("refine", "dyadic interval refinement of the good set");
  CLI::App* sub_measure =
      app.add_subcommand("measure", "good-set fractions and Lyapunov census across L");
  CLI::App* sub_verify =
      app.add_subcommand("verify", "run the full verification battery");
  for (CLI::App* s : {sub_roots, sub_orbit, sub_itin, sub_check, sub_sweep,
                      sub_refine, sub_measure, sub_verify})
    s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("cannot read " + config_path);
      const nlohmann::json j = nlohmann::json::parse(in);
      from_config(j, app, "phi", "--phi", o.phi);
      from_config(j, app, "L", "--L", o.L);
      from_config(j, app, "profile", "--profile", o.profile);
      from_config(j, app, "profile_file", "--profile-file", o.profile_file);
      from_config(j, app, "a", "--a", o.a);
      from_config(j, app, "x0", "--x0", o.x0);
      from_config(j, app, "n", "--n", o.n);
      from_config(j, app, "M", "--M", o.M);
      from_config(j, app, "Ls", "--Ls", o.Ls);
      from_config(j, app, "seed", "--seed", o.seed);
      from_config(j, app, "out", "--out", o.out);
      from_config(j, app, "format", "--format", o.format);
      from_config(j, app, "threads", "--threads", o.threads);
      from_config(j, app, "critical", "--critical", o.critical);
      from_config_opt(j, app, "radius", "--radius", o.radius);
      from_config(j, app, "depth", "--depth", o.depth);
      from_config(j, app, "width_min", "--width-min", o.width_min);
      from_config_opt(j, app, "lambda", "--lambda", o.ov_lambda);
      from_config_opt(j, app, "alpha", "--alpha", o.ov_alpha);
      from_config_opt(j, app, "N", "--N", o.ov_N);
      from_config_opt(j, app, "sigma_exp", "--sigma-exp", o.ov_sigma_exp);
      from_config(j, app, "artifacts_only", "--artifacts-only", o.artifacts_only);
      from_config(j, app, "only", "--only", o.only);
      if (!o.format.empty() && o.format != "csv" && o.format != "json")
        throw std::invalid_argument("format must be csv or json");
    }

    if (app.got_subcommand(sub_roots)) return cmd_roots(o);
    if (app.got_subcommand(sub_orbit)) return cmd_orbit(o);
    if (app.got_subcommand(sub_verify)) return cmd_verify(o);
    if (app.got_subcommand(sub_itin)) return cmd_itinerary(o, resolve_profile(o));
    if (app.got_subcommand(sub_check)) return cmd_check(o, resolve_profile(o));
    if (app.got_subcommand(sub_sweep)) return cmd_sweep(o, resolve_profile(o));
    if (app.got_subcommand(sub_refine)) return cmd_refine(o, resolve_profile(o));
    if (app.got_subcommand(sub_measure))
      return cmd_measure(o, resolve_profile(o));

    std::cout << app.help();
    return 0;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "rejected: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::string msg = e.what();
    if (msg.rfind("rejected", 0) == 0)
      std::cerr << msg << "\n";
    else
      std::cerr << "rejected: " << msg << "\n";
    return 2;
  }
}
