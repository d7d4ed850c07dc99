#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cglab/atomic.hpp"
#include "cglab/core.hpp"
#include "cglab/errors.hpp"
#include "cglab/poisson_limit.hpp"
#include "cglab/population.hpp"
#include "cglab/wardrop.hpp"

namespace cglab::io {

using nlohmann::json;

inline void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw StructuralError(where + ": expected a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw StructuralError(where + ": unknown key '" + k + "'");
}

template <class T>
T required(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw StructuralError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw StructuralError(where + ": bad value for '" + key + "': " + e.what());
  }
}

inline json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw StructuralError(path.string() + ": " + e.what());
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
  out << text;
}

inline GrowthEnvelope parse_envelope(const json& j, const std::string& where) {
  const auto kind = required<std::string>(j, "kind", where);
  if (kind == "exponential") {
    check_keys(j, {"kind", "a", "b"}, where);
    return GrowthEnvelope::exponential(required<double>(j, "a", where), required<double>(j, "b", where));
  }
  if (kind == "polynomial") {
    check_keys(j, {"kind", "degree", "b"}, where);
    return GrowthEnvelope::polynomial(required<int>(j, "degree", where), required<double>(j, "b", where));
  }
  throw StructuralError(where + ": unknown envelope kind '" + kind + "'");
}

inline json envelope_to_json(const GrowthEnvelope& g) {
  if (g.kind == GrowthEnvelope::Kind::exponential) return {{"kind", "exponential"}, {"a", g.a}, {"b", g.b}};
  return {{"kind", "polynomial"}, {"degree", g.degree}, {"b", g.b}};
}

inline CostFunction parse_cost(const json& j, const std::string& where) {
  const auto kind = required<std::string>(j, "kind", where);
  if (kind == "affine") {
    check_keys(j, {"kind", "a", "b"}, where);
    return CostFunction::affine(j.value("a", 0.0), j.value("b", 0.0));
  }
  if (kind == "polynomial") {
    check_keys(j, {"kind", "coefficients"}, where);
    return CostFunction::polynomial(required<std::vector<double>>(j, "coefficients", where));
  }
  if (kind == "table") {
    check_keys(j, {"kind", "values", "envelope"}, where);
    std::optional<GrowthEnvelope> env;
    if (j.contains("envelope")) env = parse_envelope(j.at("envelope"), where + ".envelope");
    return CostFunction::table(required<std::vector<double>>(j, "values", where), env);
  }
  if (kind == "aux") {
    check_keys(j, {"kind", "base", "tail_tol"}, where);
    if (!j.contains("base")) throw StructuralError(where + ": missing key 'base'");
    return make_aux_cost(parse_cost(j.at("base"), where + ".base"), j.value("tail_tol", kDefaultTailTol));
  }
  throw StructuralError(where + ": unknown cost kind '" + kind + "'");
}

inline json cost_to_json(const CostFunction& c) {
  return std::visit(
      [&](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CostFunction::Affine>) {
          return {{"kind", "affine"}, {"a", v.a}, {"b", v.b}};
        } else if constexpr (std::is_same_v<T, CostFunction::Polynomial>) {
          return {{"kind", "polynomial"}, {"coefficients", v.coefficients}};
        } else if constexpr (std::is_same_v<T, CostFunction::Table>) {
          json j = {{"kind", "table"}, {"values", v.values}};
          if (v.envelope) j["envelope"] = envelope_to_json(*v.envelope);
          return j;
        } else {
          return {{"kind", "aux"}, {"base", cost_to_json(*v.base)}, {"tail_tol", v.tail_tol}};
        }
      },
      c.variant());
}

struct Instance {
  Structure structure;
  std::optional<DemandVector> demand;
};

inline Instance parse_structure_part(const json& j, const std::string& where, bool demands_required) {
  std::vector<std::string> rids;
  std::vector<CostFunction> costs;
  for (const auto& r : required<json>(j, "resources", where)) {
    check_keys(r, {"id", "cost"}, where + ".resources");
    rids.push_back(required<std::string>(r, "id", where + ".resources"));
    if (!r.contains("cost")) throw StructuralError(where + ": resource '" + rids.back() + "' has no cost");
    costs.push_back(parse_cost(r.at("cost"), where + ".resources[" + rids.back() + "].cost"));
  }
  std::vector<std::string> tids;
  std::vector<std::vector<std::vector<std::string>>> strategies;
  for (const auto& t : required<json>(j, "types", where)) {
    check_keys(t, {"id", "strategies"}, where + ".types");
    tids.push_back(required<std::string>(t, "id", where + ".types"));
    strategies.push_back(required<std::vector<std::vector<std::string>>>(t, "strategies", where + ".types[" + tids.back() + "]"));
  }
  Instance inst;
  inst.structure = Structure::from_ids(std::move(rids), std::move(costs), std::move(tids), strategies);
  if (j.contains("demands")) {
    const auto& dj = j.at("demands");
    if (!dj.is_object()) throw StructuralError(where + ": 'demands' must map type ids to numbers");
    std::vector<double> d(inst.structure.type_count(), 0.0);
    std::vector<bool> seen(d.size(), false);
    for (const auto& [k, v] : dj.items()) {
      const std::size_t t = inst.structure.type_index(k);
      if (!v.is_number()) throw StructuralError(where + ": demand for '" + k + "' is not a number");
      d[t] = v.get<double>();
      seen[t] = true;
    }
    for (std::size_t t = 0; t < d.size(); ++t)
      if (!seen[t]) throw StructuralError(where + ": no demand for type '" + inst.structure.type_id(t) + "'");
    inst.demand = DemandVector(std::move(d));
  } else if (demands_required) {
    throw StructuralError(where + ": missing key 'demands'");
  }
  return inst;
}

inline Instance parse_instance(const json& j, const std::string& where = "instance") {
  check_keys(j, {"resources", "types", "demands", "description"}, where);
  return parse_structure_part(j, where, true);
}

inline json instance_to_json(const Structure& g, const std::optional<DemandVector>& d) {
  json res = json::array();
  for (std::size_t e = 0; e < g.resource_count(); ++e) res.push_back({{"id", g.resource_id(e)}, {"cost", cost_to_json(g.cost(e))}});
  json types = json::array();
  for (std::size_t t = 0; t < g.type_count(); ++t) {
    json ss = json::array();
    for (const auto& s : g.strategies(t)) {
      json ids = json::array();
      for (std::size_t e : s) ids.push_back(g.resource_id(e));
      ss.push_back(ids);
    }
    types.push_back({{"id", g.type_id(t)}, {"strategies", ss}});
  }
  json j = {{"resources", res}, {"types", types}};
  if (d) {
    json dj = json::object();
    for (std::size_t t = 0; t < g.type_count(); ++t) dj[g.type_id(t)] = (*d)[t];
    j["demands"] = dj;
  }
  return j;
}

struct GameFile {
  Structure structure;
  std::optional<DemandVector> demand;
  Model model = Model::weighted;
  std::vector<double> params;
  std::vector<std::size_t> types;

  WeightedGame weighted() const {
    if (model != Model::weighted) throw UsageError("game file describes a Bernoulli game");
    std::vector<WeightedGame::Player> p;
    for (std::size_t i = 0; i < params.size(); ++i) p.push_back({params[i], types[i]});
    return WeightedGame(structure, std::move(p));
  }
  BernoulliGame bernoulli() const {
    if (model != Model::bernoulli) throw UsageError("game file describes a weighted game");
    std::vector<BernoulliGame::Player> p;
    for (std::size_t i = 0; i < params.size(); ++i) p.push_back({params[i], types[i]});
    return BernoulliGame(structure, std::move(p));
  }
};

// Player entries: {type, weight} | {type, prob} | {type, count, weight|prob}
// where the value may be a number or the string "d/n" (type demand over count).
inline GameFile parse_game(const json& j, const std::string& where = "game") {
  check_keys(j, {"resources", "types", "demands", "players", "description"}, where);
  Instance inst = parse_structure_part(j, where, false);
  GameFile gf;
  gf.structure = inst.structure;
  gf.demand = inst.demand;
  std::optional<Model> model;
  for (const auto& p : required<json>(j, "players", where)) {
    check_keys(p, {"type", "weight", "prob", "count"}, where + ".players");
    const std::size_t t = gf.structure.type_index(required<std::string>(p, "type", where + ".players"));
    const bool w = p.contains("weight"), r = p.contains("prob");
    if (w == r) throw StructuralError(where + ": each player entry needs exactly one of 'weight' or 'prob'");
    const Model m = w ? Model::weighted : Model::bernoulli;
    if (model && *model != m) throw StructuralError(where + ": players mix weights and probabilities");
    model = m;
    const json& v = p.at(w ? "weight" : "prob");
    const std::size_t count = p.value("count", std::size_t{1});
    if (count == 0) throw StructuralError(where + ": player count must be >= 1");
    double value;
    if (v.is_string()) {
      if (v.get<std::string>() != "d/n") throw StructuralError(where + ": only the generator \"d/n\" is supported");
      if (!gf.demand) throw StructuralError(where + ": generator \"d/n\" needs 'demands'");
      value = (*gf.demand)[t] / static_cast<double>(count);
    } else if (v.is_number()) {
      value = v.get<double>();
    } else {
      throw StructuralError(where + ": player weight/prob must be a number or \"d/n\"");
    }
    for (std::size_t k = 0; k < count; ++k) {
      gf.params.push_back(value);
      gf.types.push_back(t);
    }
  }
  if (!model) throw StructuralError(where + ": no players");
  gf.model = *model;
  return gf;
}

// {"<player index>": [probabilities]}.
inline MixedProfile parse_profile(const json& j, std::size_t players, const std::string& where = "profile") {
  if (!j.is_object()) throw StructuralError(where + ": expected an object keyed by player index");
  MixedProfile p;
  p.sigma.resize(players);
  std::vector<bool> seen(players, false);
  for (const auto& [k, v] : j.items()) {
    std::size_t i;
    try {
      std::size_t used = 0;
      i = std::stoul(k, &used);
      if (used != k.size()) throw std::invalid_argument(k);
    } catch (const std::exception&) {
      throw StructuralError(where + ": key '" + k + "' is not a player index");
    }
    if (i >= players) throw StructuralError(where + ": player index " + k + " out of range");
    p.sigma[i] = v.get<std::vector<double>>();
    seen[i] = true;
  }
  for (std::size_t i = 0; i < players; ++i)
    if (!seen[i]) throw StructuralError(where + ": no entry for player " + std::to_string(i));
  return p;
}

inline json profile_to_json(const MixedProfile& p) {
  json j = json::object();
  for (std::size_t i = 0; i < p.sigma.size(); ++i) j[std::to_string(i)] = p.sigma[i];
  return j;
}

inline TypeProfile parse_type_profile(const json& j, const Structure& g, const std::string& where = "type profile") {
  if (!j.is_object()) throw StructuralError(where + ": expected an object keyed by type id");
  TypeProfile p;
  p.sigma.resize(g.type_count());
  for (const auto& [k, v] : j.items()) p.sigma[g.type_index(k)] = v.get<std::vector<double>>();
  p.validate(g);
  return p;
}

inline json wardrop_solution_to_json(const Structure& g, const WardropSolution& s) {
  json flows = json::object();
  for (std::size_t t = 0; t < g.type_count(); ++t)
    for (std::size_t k = 0; k < g.strategy_count(t); ++k) flows[g.type_id(t) + "/" + std::to_string(k)] = s.pair.y[g.flat(t, k)];
  json loads = json::object();
  for (std::size_t e = 0; e < g.resource_count(); ++e) loads[g.resource_id(e)] = s.pair.x[e];
  return {{"flows", flows},
          {"loads", loads},
          {"epsilon", s.epsilon},
          {"potential_value", s.potential_value},
          {"iterations", s.iterations},
          {"converged", s.converged}};
}

inline json constants_to_json(const BoundConstants& k) {
  json j = {{"model", model_name(k.model)}, {"alpha", k.alpha}, {"beta", k.beta}, {"beta_source", k.beta_source},
            {"zeta", k.zeta},                {"kappa", k.kappa}, {"C", k.C}};
  if (k.model == Model::weighted) {
    j["gamma"] = k.gamma.value_or(0.0);
    j["theta"] = k.theta;
    j["xi"] = k.xi;
  } else {
    j["nu"] = k.nu;
    j["theta_hat"] = k.theta_hat;
    j["xi_hat"] = k.xi_hat;
  }
  if (k.beta_affine) j["beta_affine"] = *k.beta_affine;
  if (k.beta_remark) j["beta_remark"] = *k.beta_remark;
  return j;
}

}  // namespace cglab::io
