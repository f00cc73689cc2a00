// Command-line front end: no-bullying exchange sets, top-trading-cycles,
// approximate Brouwer fixed points, and covering witnesses, all with
// machine-readable JSON output.
//
// Exit codes: 0 success, 2 malformed input, 3 solver guard tripped,
// 4 no convergence within the round budget, 5 covering violation.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <nobully/nobully.hpp>

namespace {

using nlohmann::json;
using namespace nobully;

void emit(const json& j, const std::optional<std::string>& out_path) {
  if (out_path) {
    std::ofstream f(*out_path);
    if (!f) throw input_error("cannot write to '" + *out_path + "'");
    f << j.dump(2) << "\n";
  } else {
    std::cout << j.dump(2) << "\n";
  }
}

template <class Toy>
void emit_trace(const PathTrace<Toy>& trace, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw input_error("cannot write trace to '" + path + "'");
  io::write_trace_jsonl(f, trace);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw input_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

struct CommonFlags {
  std::optional<std::string> out;
  std::optional<std::string> trace;
  std::optional<std::uint64_t> max_steps;
};

SolveOptions solve_options(const CommonFlags& c) {
  SolveOptions opt;
  opt.max_steps = c.max_steps;
  opt.record_trace = c.trace.has_value();
  return opt;
}

int cmd_solve(const std::string& profile_path, int start_1based,
              const CommonFlags& flags) {
  const auto in = io::load_profile(profile_path);
  const int start = start_1based - 1;
  auto r = solve_with_endowment(in.profile, in.owner_of_toy, start,
                                solve_options(flags));
  json j;
  for (EntityId c : r.owners) j["C"].push_back(c + 1);
  for (EntityId t : r.exchange) j["E"].push_back(t + 1);
  j["steps"] = r.steps;
  emit(j, flags.out);
  if (flags.trace) emit_trace(r.trace, *flags.trace);
  return 0;
}

int cmd_ttc(const std::string& profile_path, const CommonFlags& flags) {
  const auto in = io::load_profile(profile_path);
  const auto alloc = ttc(in.profile, in.owner_of_toy);
  json j;
  for (std::size_t c = 0; c < alloc.toy_of_child.size(); ++c)
    j[std::to_string(c + 1)] = alloc.toy_of_child[c] + 1;
  emit(j, flags.out);
  return 0;
}

SelfMap load_map(const std::optional<std::string>& map_path,
                 const std::optional<std::string>& builtin, int n,
                 std::uint64_t seed) {
  dsl::MapSpec spec;
  if (builtin && map_path)
    throw input_error("give either a map file or --builtin, not both");
  if (builtin) spec = dsl::builtin_map(*builtin, n);
  else if (map_path) spec = dsl::parse_map_text(slurp(*map_path));
  else throw input_error("need a map file or --builtin <name>");
  SelfMap f = dsl::to_selfmap(spec);
  require_valid_selfmap(f, 32, seed);
  return f;
}

int cmd_fixedpoint(const std::optional<std::string>& map_path,
                   const std::optional<std::string>& builtin, int n,
                   std::optional<double> tol, std::optional<double> eps,
                   int max_rounds, std::uint64_t seed,
                   const CommonFlags& flags) {
  const SelfMap f = load_map(map_path, builtin, n, seed);
  json j;
  if (!tol && eps) {
    // single approximation round at the requested spread
    auto r = approx_fixed_point(f, *eps, solve_options(flags));
    const GridPoint& rep = *std::min_element(r.exchange.begin(), r.exchange.end());
    const auto x = rep.to_simplex();
    j["x"] = x;
    j["residual"] = residual_at(f, x);
    j["epsilon"] = r.epsilon;
    j["N"] = r.N;
    j["rounds"] = 1;
    j["E_size"] = r.exchange.size();
    emit(j, flags.out);
    if (flags.trace) emit_trace(r.trace, *flags.trace);
    return 0;
  }
  const double want = tol.value_or(1e-6);
  auto r = find_fixed_point(f, want, eps.value_or(0.5), max_rounds,
                            SolveOptions{.max_steps = flags.max_steps,
                                         .record_trace = false});
  j["x"] = r.x;
  j["residual"] = r.residual;
  j["epsilon"] = r.epsilon;
  j["N"] = r.N;
  j["rounds"] = r.rounds;
  j["E_size"] = r.cluster_size;
  emit(j, flags.out);
  if (flags.trace) {
    // rerun the final round with recording; walks are deterministic
    auto final_round = approx_fixed_point(
        f, r.epsilon,
        SolveOptions{.max_steps = flags.max_steps, .record_trace = true});
    emit_trace(final_round.trace, *flags.trace);
  }
  return 0;
}

int cmd_kkm(const std::string& family_path, std::optional<double> tol,
            std::optional<double> eps, int max_rounds,
            const CommonFlags& flags) {
  const auto spec = dsl::parse_family_text(slurp(family_path));
  const SetFamily family = dsl::to_setfamily(spec);
  json j;
  if (!tol && eps) {
    auto r = kkm_approx(family, *eps, solve_options(flags));
    json witnesses = json::array();
    for (const auto& w : r.witnesses) witnesses.push_back(w.to_simplex());
    j["witnesses"] = std::move(witnesses);
    j["cluster_size"] = r.cluster.size();
    j["N"] = r.N;
    j["epsilon"] = r.epsilon;
    j["steps"] = r.steps;
    emit(j, flags.out);
    if (flags.trace) emit_trace(r.trace, *flags.trace);
    return 0;
  }
  auto r = kkm_refine(family, tol.value_or(0.01), eps.value_or(0.5), max_rounds,
                      SolveOptions{.max_steps = flags.max_steps,
                                   .record_trace = false});
  j["point"] = r.point;
  j["memberships"] = r.memberships;
  j["diameter"] = r.diameter;
  j["rounds"] = r.rounds;
  j["N"] = r.N;
  j["epsilon"] = r.epsilon;
  emit(j, flags.out);
  return 0;
}

int cmd_gen_profile(int n, std::uint64_t seed, const CommonFlags& flags) {
  const Profile p = random_profile(n, seed);
  emit(io::profile_to_json(p), flags.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"no-bullying exchange sets, Brouwer fixed points, and "
               "simplex covering witnesses"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string profile_path;
  std::string family_path;
  std::optional<std::string> map_path;
  std::optional<std::string> builtin;
  int start = 1;
  int dim = 3;
  int gen_n = 3;
  std::optional<double> tol;
  std::optional<double> eps;
  int max_rounds = 12;
  std::uint64_t seed = 1937;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", flags.out, "write the JSON result to a file");
    cmd->add_option("--trace", flags.trace,
                    "write the walk as JSON lines to a file");
    cmd->add_option("--max-steps", flags.max_steps,
                    "override the walk's step budget");
  };

  auto* solve_cmd =
      app.add_subcommand("solve", "no-bullying exchange set of a profile");
  solve_cmd->add_option("profile", profile_path, "profile JSON file")
      ->required();
  solve_cmd->add_option("--start", start,
                        "1-based toy id the walk starts from (default 1)");
  add_common(solve_cmd);

  auto* ttc_cmd =
      app.add_subcommand("ttc", "top-trading-cycles allocation of a profile");
  ttc_cmd->add_option("profile", profile_path, "profile JSON file")->required();
  ttc_cmd->add_option("--out", flags.out, "write the JSON result to a file");

  auto* fp_cmd = app.add_subcommand(
      "fixedpoint", "approximate fixed point of a simplex self-map");
  fp_cmd->add_option("map", map_path, "map file, one expression per line");
  fp_cmd->add_option("--builtin", builtin,
                     "identity | cyclic | softmax-demo | constant:<list>");
  fp_cmd->add_option("-n,--dim", dim, "dimension for builtin maps (default 3)");
  fp_cmd->add_option("--tol", tol, "target residual (default 1e-6)");
  fp_cmd->add_option("--eps", eps,
                     "cluster spread; alone it means a single round, with "
                     "--tol it sets the first round's spread");
  fp_cmd->add_option("--max-rounds", max_rounds, "refinement budget (default 12)");
  fp_cmd->add_option("--seed", seed, "seed for map validation probes");
  add_common(fp_cmd);

  auto* kkm_cmd = app.add_subcommand(
      "kkm", "covering witnesses for a family of simplex subsets");
  kkm_cmd->add_option("family", family_path,
                      "predicate file, one set per line")
      ->required();
  kkm_cmd->add_option("--tol", tol, "target cluster spread (default 0.01)");
  kkm_cmd->add_option("--eps", eps, "single-round spread instead of refining");
  kkm_cmd->add_option("--max-rounds", max_rounds, "refinement budget (default 12)");
  add_common(kkm_cmd);

  auto* gen_cmd = app.add_subcommand(
      "gen-profile", "seeded random self-owned profile as JSON");
  gen_cmd->add_option("-n,--children", gen_n, "number of children (default 3)")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", seed, "RNG seed (default 1937)");
  gen_cmd->add_option("--out", flags.out, "write the JSON result to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(solve_cmd))
      return cmd_solve(profile_path, start, flags);
    if (app.got_subcommand(ttc_cmd)) return cmd_ttc(profile_path, flags);
    if (app.got_subcommand(fp_cmd))
      return cmd_fixedpoint(map_path, builtin, dim, tol, eps, max_rounds, seed,
                            flags);
    if (app.got_subcommand(kkm_cmd))
      return cmd_kkm(family_path, tol, eps, max_rounds, flags);
    if (app.got_subcommand(gen_cmd)) return cmd_gen_profile(gen_n, seed, flags);
  } catch (const covering_error& e) {
    json j;
    j["error"] = "covering-violation";
    j["what"] = e.what();
    j["grid_point"] = e.coords;
    j["denominator"] = e.denom;
    std::cout << j.dump(2) << "\n";
    return 5;
  } catch (const no_convergence_error& e) {
    json j;
    j["error"] = "no-convergence";
    j["what"] = e.what();
    j["best_x"] = e.best_point;
    j["best_residual"] = e.best_residual;
    j["rounds"] = e.rounds;
    std::cout << j.dump(2) << "\n";
    return 4;
  } catch (const step_limit_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const internal_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
