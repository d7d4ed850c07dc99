#pragma once

#include <string>
#include <vector>

#include "cglab/core.hpp"

namespace cglab::instances {

struct Named {
  Structure structure;
  DemandVector demand;
};

// Five-edge bridge s->v->t, s->w->t with the crossing v->w.
// Strategy order: upper (e1,e4), lower (e2,e5), zig-zag (e1,e3,e5).
inline Named wheatstone(double demand = 1.0) {
  std::vector<CostFunction> c{CostFunction::affine(1, 0), CostFunction::constant(1), CostFunction::constant(0), CostFunction::constant(1),
                              CostFunction::affine(1, 0)};
  return {Structure::from_ids({"e1", "e2", "e3", "e4", "e5"}, std::move(c), {"od"}, {{{"e1", "e4"}, {"e2", "e5"}, {"e1", "e3", "e5"}}}),
          DemandVector({demand})};
}

inline constexpr std::size_t kUpper = 0;
inline constexpr std::size_t kLower = 1;
inline constexpr std::size_t kZigZag = 2;

// Two parallel links: c(x) = x on top, constant 2 below.
inline Named pigou(double demand = 1.0) {
  return {Structure::from_ids({"upper", "lower"}, {CostFunction::affine(1, 0), CostFunction::constant(2)}, {"od"}, {{{"upper"}, {"lower"}}}),
          DemandVector({demand})};
}

// Two parallel links with the same cost.
inline Named parallel(const CostFunction& c = CostFunction::affine(1, 0), double demand = 1.0) {
  return {Structure::from_ids({"top", "bottom"}, {c, c}, {"od"}, {{{"top"}, {"bottom"}}}), DemandVector({demand})};
}

inline std::vector<std::string> names() { return {"wheatstone", "pigou", "parallel"}; }

inline Named by_name(const std::string& name) {
  if (name == "wheatstone") return wheatstone();
  if (name == "pigou") return pigou();
  if (name == "parallel") return parallel();
  throw UsageError("unknown built-in instance '" + name + "'");
}

}  // namespace cglab::instances
