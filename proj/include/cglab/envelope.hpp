#pragma once

#include <algorithm>
#include <cmath>

#include "cglab/errors.hpp"

namespace cglab {

// Upper bound g(k) >= |h(k)| for k >= 0, used to certify truncated series.
//   exponential: scale * b * exp(a * (k + shift))
//   polynomial:  scale * b * (1 + k + shift)^degree
struct GrowthEnvelope {
  enum class Kind { exponential, polynomial };

  Kind kind = Kind::polynomial;
  double a = 0.0;
  double b = 1.0;
  int degree = 0;
  double shift = 0.0;
  double scale = 1.0;

  static GrowthEnvelope exponential(double a, double b) {
    if (!(b >= 0.0) || !std::isfinite(a)) throw DomainError("exponential envelope needs b >= 0 and finite a");
    GrowthEnvelope g;
    g.kind = Kind::exponential;
    g.a = a;
    g.b = b;
    return g;
  }

  static GrowthEnvelope polynomial(int degree, double b) {
    if (degree < 0 || !(b >= 0.0)) throw DomainError("polynomial envelope needs degree >= 0 and b >= 0");
    GrowthEnvelope g;
    g.kind = Kind::polynomial;
    g.degree = degree;
    g.b = b;
    return g;
  }

  double operator()(double k) const {
    const double m = k + shift;
    if (kind == Kind::exponential) return scale * b * std::exp(a * m);
    return scale * b * std::pow(1.0 + m, degree);
  }

  // sup over j >= k of g(j + 1) / g(j).
  double step_ratio(double k) const {
    if (kind == Kind::exponential) return std::exp(std::max(a, 0.0));
    const double m = std::max(k + shift, 0.0);
    return std::pow((2.0 + m) / (1.0 + m), degree);
  }

  // Envelope of k -> g(k + s) * factor.
  GrowthEnvelope shifted(double s, double factor = 1.0) const {
    GrowthEnvelope g = *this;
    g.shift += s;
    g.scale *= factor;
    return g;
  }
};

}  // namespace cglab
