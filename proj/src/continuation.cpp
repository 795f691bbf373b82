#include "morin/continuation.hpp"

#include <cmath>

namespace morin {

Vec curve_tangent(const PolySystem& F, const Vec& z, const Vec* hint) {
  Mat J = F.jacobian(z);
  Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeFullV);
  Vec t = svd.matrixV().col(J.cols() - 1);
  if (hint) {
    if (t.dot(*hint) < 0) t = -t;
  } else {
    // first significant coordinate positive
    for (Eigen::Index i = 0; i < t.size(); ++i)
      if (std::abs(t[i]) > 1e-8) {
        if (t[i] < 0) t = -t;
        break;
      }
  }
  return t.normalized();
}

NewtonResult curve_point_between(const PolySystem& F, const Vec& a, const Vec& b, double t,
                                 const NewtonOptions& opt) {
  Vec chord = b - a;
  Vec guess = a + t * chord;
  Mat A = chord.normalized().transpose();
  return solve_min_norm_sliced(F, guess, A, guess, opt);
}

namespace {

struct Step {
  Vec z;
  Vec t;
  bool ok = false;
};

Step corrector(const PolySystem& F, const Vec& z, const Vec& t, double h, const TraceOptions& opt) {
  Step s;
  Vec pred = z + h * t;
  Mat A = t.transpose();
  NewtonResult r = solve_min_norm_sliced(F, pred, A, pred, opt.newton);
  if (!r.converged) return s;
  // reject jumps to another branch
  if ((r.z - pred).norm() > 0.5 * h) return s;
  Vec tn = curve_tangent(F, r.z, &t);
  if (tn.dot(t) < 0.9) return s;
  s.z = std::move(r.z);
  s.t = std::move(tn);
  s.ok = true;
  return s;
}

}  // namespace

TracedCurve trace_closed_curve(const PolySystem& F, const Vec& z0, const TraceOptions& opt,
                               const Involution& involution) {
  TracedCurve out;
  out.points.push_back(z0);
  Vec z = z0;
  Vec t = curve_tangent(F, z0);
  std::vector<Vec> targets{z0};
  if (involution) targets.push_back(involution(z0));
  double travelled = 0.0;
  double h = opt.step;

  for (int it = 0; it < opt.max_steps; ++it) {
    // closing step: the curve comes back to a target within reach
    if (travelled > 4 * opt.step) {
      for (std::size_t ti = 0; ti < targets.size(); ++ti) {
        Vec d = targets[ti] - z;
        double along = d.dot(t);
        if (along > 0 && along <= 1.5 * opt.step && d.norm() < 2.0 * opt.step) {
          Mat A = t.transpose();
          NewtonResult r = solve_min_norm_sliced(F, z + along * t, A, targets[ti], opt.newton);
          if (r.converged) {
            double gap = (r.z - targets[ti]).norm();
            if (gap <= opt.close_tol) {
              out.closed = true;
              out.closed_by_involution = ti > 0;
              out.closure_gap = gap;
              return out;
            }
          }
        }
      }
    }
    Step s;
    while (h >= opt.min_step) {
      s = corrector(F, z, t, h, opt);
      if (s.ok) break;
      h *= 0.5;
    }
    if (!s.ok) {
      out.failure = "step size underflow";
      return out;
    }
    travelled += (s.z - z).norm();
    z = std::move(s.z);
    t = std::move(s.t);
    out.points.push_back(z);
    h = std::min(opt.step, 2 * h);
  }
  out.failure = "curve did not close within the step budget";
  return out;
}

}  // namespace morin
