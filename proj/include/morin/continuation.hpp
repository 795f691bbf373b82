#pragma once

#include <functional>
#include <vector>

#include "morin/poly_system.hpp"

namespace morin {

struct TraceOptions {
  double step = 1e-2;
  double min_step = 1e-7;
  double close_tol = 1e-6;
  int max_steps = 200000;
  NewtonOptions newton{30, 1e-12, 1e-16};
};

struct TracedCurve {
  std::vector<Vec> points;   // ordered; for a closed curve the start is not repeated
  bool closed = false;
  bool closed_by_involution = false;  // returned to involution(start) rather than start
  double closure_gap = 0.0;
  std::string failure;                // empty unless tracing broke down
};

using Involution = std::function<Vec(const Vec&)>;

/// Unit tangent of the 1-dimensional solution set of F (D unknowns, D-1
/// equations) at z, oriented to have positive product with `hint` if given.
Vec curve_tangent(const PolySystem& F, const Vec& z, const Vec* hint = nullptr);

/// Pseudo-arclength predictor-corrector tracing of a compact solution curve
/// of F starting at z0 (assumed on the curve). Stops when the curve returns to
/// z0 (or to involution(z0) when given) or when max_steps is hit.
TracedCurve trace_closed_curve(const PolySystem& F, const Vec& z0, const TraceOptions& opt = {},
                               const Involution& involution = {});

/// Point on the curve between two traced neighbours, found by correcting the
/// chord point t*a + (1-t)*b onto F = 0 in the hyperplane orthogonal to b - a.
NewtonResult curve_point_between(const PolySystem& F, const Vec& a, const Vec& b, double t,
                                 const NewtonOptions& opt = {});

}  // namespace morin
