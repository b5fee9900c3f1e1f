// Apache License, Version 2.0, refer to LICENSE.txt
//
// Command-line front end: decrement matrices, EPPF tables, chain and
// coalescent simulation, consistency checks, and recovery maps.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "coalfreeze/chains.hpp"
#include "coalfreeze/coalescent.hpp"
#include "coalfreeze/decrement.hpp"
#include "coalfreeze/eppf.hpp"
#include "coalfreeze/io.hpp"
#include "coalfreeze/mc.hpp"
#include "coalfreeze/measures.hpp"

namespace cf = coalfreeze;
using nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct GlobalOpts {
  std::string format = "csv";  // csv | json
  std::string output;          // empty = stdout
  bool exact_only = false;
};

void emit(const GlobalOpts& g, const std::string& text) {
  if (g.output.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    std::ofstream out(g.output);
    if (!out) throw std::invalid_argument("cannot write file: " + g.output);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
  }
}

void emit(const GlobalOpts& g, const json& j) { emit(g, j.dump(2)); }

cf::FreezeMeasure resolve_measure(const std::string& spec,
                                  const std::string& rho_str, bool rho_given) {
  const cf::Rational rho =
      rho_given ? cf::parse_rational(rho_str) : cf::Rational(1);
  if (spec == "kingman") return cf::FreezeMeasure::kingman(rho);
  if (spec == "hook") return cf::FreezeMeasure::hook(rho);
  if (spec == "uniform") return cf::FreezeMeasure::uniform(rho);
  json j;
  if (!spec.empty() && spec.front() == '{') {
    j = json::parse(spec);
  } else {
    j = cf::load_json_file(spec);
  }
  cf::FreezeMeasure m = cf::measure_from_json(j);
  if (rho_given) m.rho = cf::parse_rational(rho_str);
  m.validate();
  return m;
}

uint64_t resolve_seed(const std::optional<uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device rd;
  const uint64_t s =
      (static_cast<uint64_t>(rd()) << 32) ^ static_cast<uint64_t>(rd());
  std::cerr << "seed not given; using seed=" << s << "\n";
  return s;
}

std::vector<cf::Rational> parse_rational_list(const std::string& csv) {
  std::vector<cf::Rational> out;
  std::istringstream is(csv);
  std::string tok;
  while (std::getline(is, tok, ',')) out.push_back(cf::parse_rational(tok));
  return out;
}

json shape_table_json(const std::map<cf::IntegerPartition, cf::Rational>& law) {
  json items = json::array();
  for (const auto& [shape, p] : law)
    items.push_back({{"shape", shape.parts},
                     {"p", cf::rational_to_string(p)},
                     {"p_float", cf::to_double(p)}});
  return items;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exchangeable partitions from coalescents with freeze"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--format", g.format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("-o,--output", g.output, "Write output to a file");
  app.add_flag("--exact", g.exact_only,
               "Require exact rational output (rejected by Monte Carlo "
               "commands)");

  // shared option storage
  std::string measure_spec, matrix_file, eppf_file, flavor_str = "mohle";
  std::string rho_str = "1", engine = "mohle", mode = "fm", theta_str = "1";
  std::string phi_list, rho_seed_str = "1";
  int n = 0, m_restrict = 0;
  long runs = 100000, samples = 20000, burnin = -1, thin = -1;
  std::optional<uint64_t> seed;
  double horizon = -1.0;
  bool serial = false, exact_stationary = false;

  // ---- decrement ----
  auto* cmd_decrement =
      app.add_subcommand("decrement", "Decrement matrix from a freeze measure");
  cmd_decrement->add_option("--measure", measure_spec,
                            "kingman|hook|uniform, a JSON file, or inline JSON")
      ->required();
  auto* dec_rho = cmd_decrement->add_option("--rho", rho_str, "Freeze rate");
  cmd_decrement->add_option("--n", n, "Matrix size")->required();
  cmd_decrement->add_option("--flavor", flavor_str, "mohle|regenerative")
      ->check(CLI::IsMember({"mohle", "regenerative"}));

  // ---- eppf ----
  auto* cmd_eppf = app.add_subcommand("eppf", "Exact EPPF table");
  cmd_eppf->add_option("--measure", measure_spec,
                       "Measure (ignored for --engine ewens)");
  auto* eppf_rho = cmd_eppf->add_option("--rho", rho_str, "Freeze rate");
  cmd_eppf->add_option("--matrix", matrix_file, "Decrement matrix JSON file");
  cmd_eppf->add_option("--n", n, "Table size")->required();
  cmd_eppf->add_option("--engine", engine, "mohle|regenerative|ewens")
      ->check(CLI::IsMember({"mohle", "regenerative", "ewens"}));
  cmd_eppf->add_option("--theta", theta_str, "Ewens parameter");

  // ---- simulate ----
  auto* cmd_simulate = app.add_subcommand("simulate", "Monte Carlo simulation");
  cmd_simulate->add_option("--mode", mode, "fm|coalescent|sa")
      ->check(CLI::IsMember({"fm", "coalescent", "sa"}));
  cmd_simulate->add_option("--measure", measure_spec, "Freeze measure")
      ->required();
  auto* sim_rho = cmd_simulate->add_option("--rho", rho_str, "Freeze rate");
  cmd_simulate->add_option("--n", n, "Sample size")->required();
  cmd_simulate->add_option("--runs", runs, "Number of runs / samples");
  cmd_simulate->add_option("--seed", seed, "RNG seed (default: random, printed)");
  cmd_simulate->add_flag("--serial", serial,
                         "Single-worker execution (same output)");
  cmd_simulate->add_flag("--exact-stationary", exact_stationary,
                         "Exact SA stationary law instead of sampling (n <= 8)");
  cmd_simulate->add_option("--burnin", burnin, "SA burn-in steps");
  cmd_simulate->add_option("--thin", thin, "SA thinning stride");
  cmd_simulate->add_option("--horizon", horizon,
                           "Time horizon (required when rho = 0)");

  // ---- check ----
  auto* cmd_check = app.add_subcommand("check", "Consistency checks");
  cmd_check->require_subcommand(1);
  auto* chk_consistency = cmd_check->add_subcommand(
      "consistency", "Backward-recursion consistency of a decrement matrix");
  chk_consistency->add_option("--measure", measure_spec, "Freeze measure");
  auto* chk_rho = chk_consistency->add_option("--rho", rho_str, "Freeze rate");
  chk_consistency->add_option("--matrix", matrix_file, "Matrix JSON file");
  chk_consistency->add_option("--n", n, "Size (with --measure)");
  chk_consistency->add_option("--flavor", flavor_str, "mohle|regenerative")
      ->check(CLI::IsMember({"mohle", "regenerative"}));

  auto* chk_addition =
      cmd_check->add_subcommand("addition", "EPPF addition rule");
  chk_addition->add_option("--eppf", eppf_file, "EPPF JSON file")->required();
  chk_addition->add_option("--n", n, "Check up to this size (default n_max)");

  auto* chk_jump = cmd_check->add_subcommand(
      "jump", "Jump-process consistency of the FM chain under restriction");
  chk_jump->add_option("--measure", measure_spec, "Freeze measure");
  auto* jump_rho = chk_jump->add_option("--rho", rho_str, "Freeze rate");
  chk_jump->add_option("--matrix", matrix_file, "Matrix JSON file");
  chk_jump->add_option("--n", n, "Chain size")->required();
  chk_jump->add_option("--m", m_restrict, "Restriction size")->required();
  chk_jump->add_option("--samples", samples, "Monte Carlo samples (n > 5)");
  chk_jump->add_option("--seed", seed, "RNG seed (Monte Carlo mode)");

  auto* chk_positivity = cmd_check->add_subcommand(
      "positivity", "Backward-difference construction from a rate sequence");
  chk_positivity
      ->add_option("--phi", phi_list, "Comma-separated Phi(1),Phi(2),...")
      ->required();
  chk_positivity->add_option("--rho", rho_str, "Freeze rate")->required();

  // ---- recover ----
  auto* cmd_recover = app.add_subcommand("recover", "Inverse maps");
  cmd_recover->require_subcommand(1);
  auto* rec_decrement = cmd_recover->add_subcommand(
      "decrement", "Decrement matrix from an EPPF table");
  rec_decrement->add_option("--eppf", eppf_file, "EPPF JSON file")->required();
  rec_decrement->add_option("--n", n, "Rows to recover (default n_max)");
  auto* rec_phi =
      cmd_recover->add_subcommand("phi", "Rate ladder from a decrement matrix");
  rec_phi->add_option("--matrix", matrix_file, "Matrix JSON file")->required();
  rec_phi->add_option("--rho-seed", rho_seed_str, "Anchor for Phi(1)");

  // let --format/-o/--exact appear after a subcommand name
  const std::function<void(CLI::App*)> enable_fallthrough =
      [&](CLI::App* cmd) {
        cmd->fallthrough();
        for (auto* sub : cmd->get_subcommands({})) enable_fallthrough(sub);
      };
  for (auto* sub : app.get_subcommands({})) enable_fallthrough(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (cmd_decrement->parsed()) {
      const auto m = resolve_measure(measure_spec, rho_str, !dec_rho->empty());
      const cf::Flavor flavor = cf::flavor_from_name(flavor_str);
      const cf::DecrementMatrix q = (flavor == cf::Flavor::mohle)
                                        ? cf::from_measure(m, n)
                                        : cf::regenerative_from_measure(m, n);
      if (g.exact_only && !q.exact())
        throw std::invalid_argument("--exact: measure has float entries");
      if (g.format == "json")
        emit(g, cf::matrix_to_json(q));
      else
        emit(g, cf::matrix_to_csv(q));
      return kExitPass;
    }

    if (cmd_eppf->parsed()) {
      cf::EppfTable table;
      if (engine == "ewens") {
        table = cf::ewens_eppf(cf::parse_rational(theta_str), n);
      } else {
        const cf::Flavor want = cf::flavor_from_name(engine);
        std::optional<cf::DecrementMatrix> q;
        if (!matrix_file.empty()) {
          q = cf::matrix_from_json(cf::load_json_file(matrix_file));
        } else if (!measure_spec.empty()) {
          const auto m =
              resolve_measure(measure_spec, rho_str, !eppf_rho->empty());
          q = (want == cf::Flavor::mohle)
                  ? cf::from_measure(m, n)
                  : cf::regenerative_from_measure(m, n);
        } else {
          throw std::invalid_argument("eppf: need --measure or --matrix");
        }
        table = (want == cf::Flavor::mohle) ? cf::mohle_eppf(*q, n)
                                            : cf::regenerative_eppf(*q, n);
      }
      if (g.exact_only && !table.exact)
        throw std::invalid_argument("--exact: table has float entries");
      if (g.format == "json")
        emit(g, cf::eppf_to_json(table));
      else
        emit(g, cf::eppf_to_csv(table));
      return kExitPass;
    }

    if (cmd_simulate->parsed()) {
      const auto m = resolve_measure(measure_spec, rho_str, !sim_rho->empty());
      if (mode == "sa" && exact_stationary) {
        const auto q = cf::from_measure(m, n);
        const auto dist = cf::sa_stationary(n, q.row(n));
        json out{{"version", cf::kFormatVersion},
                 {"mode", "sa"},
                 {"exact_stationary", true},
                 {"n", n},
                 {"shape_law", shape_table_json(cf::shape_law(dist))}};
        emit(g, out);
        return kExitPass;
      }
      if (g.exact_only)
        throw std::invalid_argument(
            "--exact: simulation output requires floats");
      const uint64_t s = resolve_seed(seed);
      if (mode == "coalescent" && runs == 1) {
        cf::RngStream rng = cf::RngStream::for_run(s, 0);
        std::optional<double> h;
        if (horizon > 0) h = horizon;
        const auto traj = cf::simulate(n, m, rng, h, true);
        json out = cf::trajectory_to_json(traj);
        out["seed"] = s;
        emit(g, out);
        return kExitPass;
      }
      cf::EmpiricalEppf emp;
      if (mode == "fm") {
        const auto q = cf::from_measure(m, n);
        emp = cf::fm_estimate_eppf(n, q, runs, s, !serial);
      } else if (mode == "coalescent") {
        emp = cf::coalescent_estimate_eppf(n, m, runs, s, !serial);
      } else {  // sa: burn-in then thinned sampling of the chain
        std::cerr << "note: SA sampling is approximate; use "
                     "--exact-stationary for the exact law (n <= 8)\n";
        const auto q = cf::from_measure(m, n);
        const long burn = burnin >= 0 ? burnin : 100L * n;
        const long stride = thin >= 1 ? thin : n;
        cf::RngStream rng = cf::RngStream::for_run(s, 0);
        cf::SetPartition state = cf::SetPartition::singletons(n);
        for (long i = 0; i < burn; ++i) state = cf::sa_step(state, q.row(n), rng);
        cf::ShapeCounts counts;
        counts.n = n;
        counts.samples = runs;
        counts.seed = s;
        for (long r = 0; r < runs; ++r) {
          for (long i = 0; i < stride; ++i)
            state = cf::sa_step(state, q.row(n), rng);
          counts.counts[state.shape()] += 1;
        }
        emp = cf::estimate_from_counts(counts);
      }
      std::optional<cf::EppfTable> exact;
      if (n <= 12) exact = cf::mohle_eppf(cf::from_measure(m, n), n);
      if (g.format == "json") {
        json out = cf::empirical_to_json(emp, exact ? &*exact : nullptr);
        out["mode"] = mode;
        emit(g, out);
      } else {
        emit(g, cf::empirical_to_csv(emp, exact ? &*exact : nullptr));
      }
      return kExitPass;
    }

    if (chk_consistency->parsed()) {
      std::optional<cf::DecrementMatrix> q;
      if (!matrix_file.empty()) {
        q = cf::matrix_from_json(cf::load_json_file(matrix_file));
      } else if (!measure_spec.empty()) {
        if (n < 1) throw std::invalid_argument("check consistency: need --n");
        const auto m =
            resolve_measure(measure_spec, rho_str, !chk_rho->empty());
        q = (cf::flavor_from_name(flavor_str) == cf::Flavor::mohle)
                ? cf::from_measure(m, n)
                : cf::regenerative_from_measure(m, n);
      } else {
        throw std::invalid_argument(
            "check consistency: need --measure or --matrix");
      }
      const auto report = cf::check_consistency(*q);
      json out{{"version", cf::kFormatVersion},
               {"check", "consistency"},
               {"flavor", cf::flavor_name(q->flavor())},
               {"n", q->n_max()},
               {"pass", report.ok}};
      if (!report.ok) out["first_violation"] = report.first_violation;
      emit(g, out);
      return report.ok ? kExitPass : kExitCheckFailed;
    }

    if (chk_addition->parsed()) {
      const auto table = cf::eppf_from_json(cf::load_json_file(eppf_file));
      const int upto = n > 0 ? n : table.n_max;
      const cf::Rational tol =
          table.exact ? cf::Rational(0) : cf::rat(1, 10000000000L);
      const auto report = cf::check_addition_rule(table, upto, tol);
      json out{{"version", cf::kFormatVersion},
               {"check", "addition"},
               {"n", upto},
               {"pass", report.ok},
               {"violations", json::array()}};
      for (const auto& v : report.violations)
        out["violations"].push_back({{"partition", v.partition.parts},
                                     {"lhs", cf::rational_to_string(v.lhs)},
                                     {"rhs", cf::rational_to_string(v.rhs)}});
      emit(g, out);
      return report.ok ? kExitPass : kExitCheckFailed;
    }

    if (chk_jump->parsed()) {
      std::optional<cf::DecrementMatrix> q;
      if (!matrix_file.empty())
        q = cf::matrix_from_json(cf::load_json_file(matrix_file));
      else if (!measure_spec.empty())
        q = cf::from_measure(
            resolve_measure(measure_spec, rho_str, !jump_rho->empty()),
            n);
      else
        throw std::invalid_argument("check jump: need --measure or --matrix");
      const uint64_t s = n > 5 ? resolve_seed(seed) : 0;
      const auto report = cf::check_jump_consistency(*q, n, m_restrict,
                                                     n > 5 ? samples : 0, s);
      const double threshold = report.exact_mode ? 0.0 : 4.0 * report.mc_error;
      const bool pass = report.consistent(threshold);
      json out{{"version", cf::kFormatVersion},
               {"check", "jump"},
               {"n", report.n},
               {"m", report.m},
               {"exact", report.exact_mode},
               {"states_checked", report.states_checked},
               {"max_tv", report.max_tv},
               {"threshold", threshold},
               {"pass", pass}};
      if (!report.exact_mode) {
        out["samples"] = report.samples;
        out["seed"] = report.seed;
        out["mc_error"] = report.mc_error;
      }
      if (!report.worst_state.empty()) out["worst_state"] = report.worst_state;
      emit(g, out);
      return pass ? kExitPass : kExitCheckFailed;
    }

    if (chk_positivity->parsed()) {
      const auto phis = parse_rational_list(phi_list);
      const auto report =
          cf::phi_from_sequence(phis, cf::parse_rational(rho_str));
      json out = cf::positivity_report_to_json(report);
      out["check"] = "positivity";
      emit(g, out);
      return report.valid() ? kExitPass : kExitCheckFailed;
    }

    if (rec_decrement->parsed()) {
      const auto table = cf::eppf_from_json(cf::load_json_file(eppf_file));
      const int upto = n > 0 ? n : table.n_max;
      const auto q = cf::recover_decrement(table, upto);
      if (g.format == "json")
        emit(g, cf::matrix_to_json(q));
      else
        emit(g, cf::matrix_to_csv(q));
      return kExitPass;
    }

    if (rec_phi->parsed()) {
      const auto q = cf::matrix_from_json(cf::load_json_file(matrix_file));
      const auto ladder =
          cf::recover_phi_ladder(q, cf::parse_rational(rho_seed_str));
      emit(g, cf::phi_ladder_to_json(ladder));
      return kExitPass;
    }

    throw std::invalid_argument("no subcommand");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
