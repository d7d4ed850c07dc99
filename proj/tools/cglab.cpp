// cglab: command-line front end. Exit 0 iff every asserted check passes,
// 1 when a check fails, 2 on input or configuration errors.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cglab/harness.hpp"
#include "cglab/io.hpp"
#include "cglab/population.hpp"

namespace {

using nlohmann::json;
using namespace cglab;

std::uint64_t seed_or_env(std::uint64_t fallback) {
  if (const char* env = std::getenv("CGLAB_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError("CGLAB_SEED must be an unsigned integer");
    }
  }
  return fallback;
}

void emit(const json& j, const std::string& out) {
  if (out.empty())
    std::cout << j.dump(2) << '\n';
  else
    io::write_text(out, j.dump(2) + '\n');
}

io::Instance load_instance(const std::string& arg) {
  const auto names = instances::names();
  if (std::find(names.begin(), names.end(), arg) != names.end()) {
    auto b = instances::by_name(arg);
    return {b.structure, b.demand};
  }
  return io::parse_instance(io::read_json(arg), arg);
}

int cmd_wardrop(const std::string& inst_path, double tol, const std::string& out) {
  const auto inst = load_instance(inst_path);
  WardropOptions wo;
  wo.target_eps = tol;
  const auto sol = solve_wardrop(inst.structure, *inst.demand, wo);
  json j = io::wardrop_solution_to_json(inst.structure, sol);
  j["social_cost"] = social_cost(inst.structure, sol.pair);
  j["target_eps"] = tol;
  const bool ok = sol.epsilon <= tol;
  j["ok"] = ok;
  emit(j, out);
  if (!out.empty())
    std::printf("epsilon %.3g (target %.3g) %s\n", sol.epsilon, tol, ok ? "ok" : "FAIL");
  return ok ? 0 : 1;
}

template <Model M>
json costs_json(const AtomicGame<M>& g, const MixedProfile& p, const AtomicOptions& opt) {
  json players = json::array();
  for (std::size_t i = 0; i < g.size(); ++i) {
    json c = json::array();
    for (const auto& e : strategy_costs(g, p, i, opt)) c.push_back(e.value);
    players.push_back({{"strategy_costs", c}, {"expected_cost", expected_player_cost(g, p, i, opt)}});
  }
  return players;
}

template <Model M>
int atomic_verify(const AtomicGame<M>& g, const std::string& profile_path, double tol, const AtomicOptions& opt, const std::string& out) {
  const auto p = io::parse_profile(io::read_json(profile_path), g.size(), profile_path);
  p.validate(g);
  const auto rep = verify_equilibrium(g, p, opt);
  const auto e = esc(g, p, opt);
  const bool ok = rep.max_regret <= tol;
  emit({{"model", model_name(M)},
        {"max_regret", rep.max_regret},
        {"regret", rep.regret},
        {"exact", rep.exact},
        {"esc", e.value},
        {"esc_std_error", e.std_error},
        {"players", costs_json(g, p, opt)},
        {"tol", tol},
        {"equilibrium", ok}},
       out);
  return ok ? 0 : 1;
}

template <Model M>
int atomic_solve(const AtomicGame<M>& g, const std::string& method, double tol, const AtomicOptions& opt, const std::string& out) {
  std::optional<MixedProfile> prof;
  json info;
  if (method == "pure") {
    const auto br = best_response_dynamics(g, std::vector<std::size_t>(g.size(), 0), 10000, TieBreak::keep_current, opt);
    info = {{"method", "best-response"}, {"sweeps", br.sweeps}, {"converged", br.converged}, {"cycle", br.cycle}};
    if (br.converged) prof = pure_profile(g, std::span<const std::size_t>(br.profile));
  } else {
    const auto r = symmetric_mixed_equilibrium(g, tol, 0.5, opt);
    info = {{"method", "symmetric"}, {"found", r.found}, {"sigma", r.sigma}};
    if (r.found) prof = r.profile;
  }
  bool ok = false;
  if (prof) {
    const auto rep = verify_equilibrium(g, *prof, opt);
    ok = rep.max_regret <= tol;
    info["profile"] = io::profile_to_json(*prof);
    info["max_regret"] = rep.max_regret;
    info["esc"] = esc(g, *prof, opt).value;
    info["expected_loads"] = expected_loads(g, *prof);
  }
  info["model"] = model_name(M);
  info["equilibrium"] = ok;
  emit(info, out);
  return ok ? 0 : 1;
}

int cmd_limit(const std::string& inst_path, std::optional<double> alpha, double tail_tol, const std::string& out) {
  const auto inst = load_instance(inst_path);
  const Structure limit = build_limit_game(inst.structure, tail_tol);
  json j = {{"instance", io::instance_to_json(limit, inst.demand)}};
  bool ok = true;
  if (inst.demand) {
    const double a = alpha.value_or(default_alpha(*inst.demand));
    const auto lim = solve_limit(limit, *inst.demand);
    json loads = json::object();
    for (std::size_t e = 0; e < limit.resource_count(); ++e) loads[limit.resource_id(e)] = lim.we_loads[e];
    j["limit_equilibrium"] = {{"loads", loads},
                              {"epsilon", lim.we_epsilon},
                              {"eq", lim.eq},
                              {"opt", std::isnan(lim.opt) ? json(nullptr) : json(lim.opt)},
                              {"poa", std::isnan(lim.poa) ? json(nullptr) : json(lim.poa)}};
    ok = lim.we_epsilon <= 1e-9;
    try {
      j["constants"] = io::constants_to_json(regularity_constants_auto(inst.structure, a, Model::bernoulli));
    } catch (const ConfigurationError& e) {
      j["constants"] = {{"error", e.what()}};
      ok = false;
    }
  }
  emit(j, out);
  return ok ? 0 : 1;
}

int cmd_bounds(const std::string& inst_path, const std::string& model_s, double param, std::optional<double> alpha, const std::string& out) {
  const auto inst = load_instance(inst_path);
  const Model m = model_s == "bernoulli" ? Model::bernoulli : Model::weighted;
  const double a = alpha.value_or(default_alpha(*inst.demand));
  const auto k = regularity_constants_auto(inst.structure, a, m);
  const auto rb = rate_bounds(k, m, param);
  json j = {{"constants", io::constants_to_json(k)}, {"param", param}, {"bound", rb.base}};
  if (m == Model::bernoulli) j["lambda"] = lambda_bound(k, param);
  emit(j, out);
  return 0;
}

int cmd_converge(const std::string& spec_path, const std::string& out, const std::string& json_out) {
  const auto spec = parse_sequence_spec(io::read_json(spec_path), std::filesystem::path(spec_path).parent_path());
  const auto rep = run_convergence(spec);
  const std::string csv = report_csv(rep);
  if (out.empty())
    std::cout << csv;
  else
    io::write_text(out, csv);
  if (!json_out.empty()) io::write_text(json_out, report_json(rep).dump(2) + '\n');
  std::size_t bad = 0;
  for (const auto& r : rep.rows)
    if (!(r.ok && r.bound_ok)) {
      ++bad;
      std::fprintf(stderr, "row n=%zu: %s\n", r.n, r.ok ? "bound violated" : r.note.c_str());
    }
  if (!out.empty()) std::printf("%zu rows, %zu flagged\n", rep.rows.size(), bad);
  return bad == 0 ? 0 : 1;
}

int cmd_example(const std::string& name) {
  const auto r = reproduce_example(name);
  for (const auto& c : r.checks)
    std::printf("%-4s %-55s computed %.12g expected %.12g (tol %.1e)\n", c.pass ? "ok" : "FAIL", c.label.c_str(), c.computed, c.expected, c.tol);
  std::printf("%s: %s\n", name.c_str(), r.all_pass() ? "all checks pass" : "some checks FAILED");
  return r.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"congestion-game equilibrium laboratory"};
  app.require_subcommand(1);

  std::string path, out, json_out, profile, solve, model_s = "weighted", name;
  double tol = 1e-10, tail_tol = kDefaultTailTol, param = 0.0;
  std::optional<double> alpha;
  std::uint64_t seed = 0;
  bool verify = false;

  auto* w = app.add_subcommand("wardrop", "solve the nonatomic equilibrium of an instance");
  w->add_option("instance", path, "instance JSON or built-in name")->required();
  w->add_option("--tol", tol, "target epsilon");
  w->add_option("--json", out, "write the solution here instead of stdout");

  double atol = 1e-9;
  auto* a = app.add_subcommand("atomic", "verify or compute atomic equilibria");
  a->add_option("game", path, "game JSON")->required();
  a->add_option("--profile", profile, "profile JSON to verify");
  a->add_flag("--verify", verify, "verify the given profile");
  a->add_option("--solve", solve, "compute an equilibrium")->check(CLI::IsMember({"pure", "symmetric"}));
  a->add_option("--tol", atol, "regret tolerance");
  a->add_option("--seed", seed, "Monte Carlo seed (CGLAB_SEED overrides)");
  a->add_option("--out", out, "write the report here instead of stdout");

  auto* l = app.add_subcommand("limit", "build the smoothed limit game and its constants");
  l->add_option("instance", path, "instance JSON or built-in name")->required();
  l->add_option("--alpha", alpha, "headroom above total demand (default 1.5 d)");
  l->add_option("--tail-tol", tail_tol, "series tail tolerance");
  l->add_option("--out", out, "write the JSON here instead of stdout");

  auto* b = app.add_subcommand("bounds", "rate bounds for a weight or participation level");
  b->add_option("instance", path, "instance JSON or built-in name")->required();
  b->add_option("--model", model_s)->check(CLI::IsMember({"weighted", "bernoulli"}))->required();
  b->add_option("--param", param, "max weight w or max probability r")->required();
  b->add_option("--alpha", alpha, "headroom above total demand (default 1.5 d)");
  b->add_option("--out", out, "write the JSON here instead of stdout");

  auto* c = app.add_subcommand("converge", "run a convergence sequence");
  c->add_option("spec", path, "sequence spec JSON")->required();
  c->add_option("--out", out, "CSV report path");
  c->add_option("--json", json_out, "JSON report path");

  auto* x = app.add_subcommand("example", "reproduce a worked example");
  x->add_option("name", name, "wheatstone-weighted | wheatstone-bernoulli | pigou | parallel")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*w) return cmd_wardrop(path, tol, out);
    if (*a) {
      if (verify && !solve.empty()) throw UsageError("use either --verify or --solve");
      if (!verify && solve.empty()) throw UsageError("atomic needs --verify --profile <p> or --solve pure|symmetric");
      if (verify && profile.empty()) throw UsageError("--verify needs --profile");
      AtomicOptions opt;
      opt.seed = seed_or_env(seed);
      const auto gf = io::parse_game(io::read_json(path), path);
      if (gf.model == Model::weighted) {
        const auto g = gf.weighted();
        return verify ? atomic_verify(g, profile, atol, opt, out) : atomic_solve(g, solve, atol, opt, out);
      }
      const auto g = gf.bernoulli();
      return verify ? atomic_verify(g, profile, atol, opt, out) : atomic_solve(g, solve, atol, opt, out);
    }
    if (*l) return cmd_limit(path, alpha, tail_tol, out);
    if (*b) return cmd_bounds(path, model_s, param, alpha, out);
    if (*c) return cmd_converge(path, out, json_out);
    if (*x) return cmd_example(name);
  } catch (const cglab::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error: malformed JSON: %s\n", e.what());
    return 2;
  }
  return 2;
}
