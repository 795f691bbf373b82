#include "morin/poly_system.hpp"

#include <cmath>

namespace morin {

PolyFunction::PolyFunction(Expr e) : expr_(std::move(e)) {
  grad_ = expr_.gradient();
  hess_.resize(grad_.size());
  for (std::size_t i = 0; i < grad_.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) hess_[i].push_back(grad_[i].differentiate(j));
}

Vec PolyFunction::gradient(const Vec& z) const {
  Vec g(static_cast<Eigen::Index>(grad_.size()));
  for (std::size_t i = 0; i < grad_.size(); ++i) g[static_cast<Eigen::Index>(i)] = grad_[i].evaluate(as_span(z));
  return g;
}

Mat PolyFunction::hessian(const Vec& z) const {
  const auto n = static_cast<Eigen::Index>(grad_.size());
  Mat h(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const auto& e = hess_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      h(i, j) = h(j, i) = e.is_zero() ? 0.0 : e.evaluate(as_span(z));
    }
  return h;
}

PolySystem::PolySystem(std::vector<Expr> equations, std::size_t nvars, bool with_hessians)
    : nvars_(nvars), eqs_(std::move(equations)) {
  for (const auto& e : eqs_)
    if (e.ambient_dim() != nvars_) throw DimensionError("system equation has wrong dimension");
  jac_ = morin::jacobian(std::span<const Expr>(eqs_));
  if (with_hessians) {
    hess_.resize(eqs_.size());
    for (std::size_t k = 0; k < eqs_.size(); ++k) {
      hess_[k].resize(nvars_);
      for (std::size_t i = 0; i < nvars_; ++i)
        for (std::size_t j = 0; j <= i; ++j) hess_[k][i].push_back(jac_[k][i].differentiate(j));
    }
  }
}

Vec PolySystem::evaluate(const Vec& z) const {
  Vec r(static_cast<Eigen::Index>(eqs_.size()));
  for (std::size_t k = 0; k < eqs_.size(); ++k) r[static_cast<Eigen::Index>(k)] = eqs_[k].evaluate(as_span(z));
  return r;
}

Mat PolySystem::jacobian(const Vec& z) const {
  Mat j(static_cast<Eigen::Index>(eqs_.size()), static_cast<Eigen::Index>(nvars_));
  for (std::size_t k = 0; k < eqs_.size(); ++k)
    for (std::size_t i = 0; i < nvars_; ++i) {
      const auto& e = jac_[k][i];
      j(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = e.is_zero() ? 0.0 : e.evaluate(as_span(z));
    }
  return j;
}

Mat PolySystem::weighted_hessian(const Vec& z, const Vec& w) const {
  if (hess_.empty() && !eqs_.empty()) throw Error("system built without second derivatives");
  const auto n = static_cast<Eigen::Index>(nvars_);
  Mat h = Mat::Zero(n, n);
  for (std::size_t k = 0; k < eqs_.size(); ++k) {
    double wk = w[static_cast<Eigen::Index>(k)];
    if (wk == 0.0) continue;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) {
        const auto& e = hess_[k][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        if (e.is_zero()) continue;
        double v = wk * e.evaluate(as_span(z));
        h(i, j) += v;
        if (i != j) h(j, i) += v;
      }
  }
  return h;
}

namespace {

Vec min_norm_step(const Mat& J, const Vec& r) {
  Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  double cut = (s.size() ? s[0] : 0.0) * 1e-13;
  Vec tmp = svd.matrixU().transpose() * r;
  for (Eigen::Index i = 0; i < s.size(); ++i) tmp[i] = s[i] > cut ? tmp[i] / s[i] : 0.0;
  return svd.matrixV() * tmp;
}

template <class ResidualFn, class JacobianFn>
NewtonResult damped_newton(ResidualFn residual, JacobianFn jac, Vec z, const NewtonOptions& opt) {
  NewtonResult out;
  Vec r = residual(z);
  double norm = r.norm();
  int it = 0;
  for (; it < opt.max_iters && norm > opt.residual_tol; ++it) {
    if (!std::isfinite(norm)) break;
    Vec dz = -min_norm_step(jac(z), r);
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      Vec zt = z + alpha * dz;
      Vec rt = residual(zt);
      double nt = rt.norm();
      if (std::isfinite(nt) && nt < norm) {
        z = std::move(zt);
        r = std::move(rt);
        norm = nt;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted || alpha * dz.norm() < opt.step_tol * (1.0 + z.norm())) break;
  }
  out.z = std::move(z);
  out.residual = norm;
  out.iterations = it;
  // Rounding floor: a residual within a few ulps of tolerance still counts.
  out.converged = std::isfinite(norm) && norm <= std::max(opt.residual_tol, 1e-13 * (1.0 + out.z.norm()));
  return out;
}

}  // namespace

NewtonResult solve_min_norm(const PolySystem& F, Vec z0, const NewtonOptions& opt) {
  return damped_newton([&](const Vec& z) { return F.evaluate(z); },
                       [&](const Vec& z) { return F.jacobian(z); }, std::move(z0), opt);
}

NewtonResult solve_min_norm_sliced(const PolySystem& F, Vec z0, const Mat& A, const Vec& z_ref,
                                   const NewtonOptions& opt) {
  const auto E = static_cast<Eigen::Index>(F.num_eqs());
  auto residual = [&](const Vec& z) {
    Vec r(E + A.rows());
    r.head(E) = F.evaluate(z);
    r.tail(A.rows()) = A * (z - z_ref);
    return r;
  };
  auto jac = [&](const Vec& z) {
    Mat j(E + A.rows(), z.size());
    j.topRows(E) = F.jacobian(z);
    j.bottomRows(A.rows()) = A;
    return j;
  };
  return damped_newton(residual, jac, std::move(z0), opt);
}

Vec singular_values(const Mat& J) {
  if (J.rows() == 0 || J.cols() == 0) return Vec();
  Eigen::JacobiSVD<Mat> svd(J);
  return svd.singularValues();
}

Mat canonical_null_basis(const Mat& J, Eigen::Index nullity) {
  const Eigen::Index D = J.cols();
  Mat P;
  if (J.rows() == 0) {
    P = Mat::Identity(D, D);
  } else {
    Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeFullV);
    Mat V = svd.matrixV().rightCols(nullity);
    P = V * V.transpose();
  }
  Mat basis(D, nullity);
  Eigen::Index found = 0;
  for (Eigen::Index i = 0; i < D && found < nullity; ++i) {
    Vec w = P.col(i);
    for (Eigen::Index b = 0; b < found; ++b) w -= basis.col(b).dot(w) * basis.col(b);
    for (Eigen::Index b = 0; b < found; ++b) w -= basis.col(b).dot(w) * basis.col(b);
    double nw = w.norm();
    if (nw > 1e-6) basis.col(found++) = w / nw;
  }
  if (found < nullity) throw SolverError("could not build a tangent basis");
  return basis;
}

Mat canonical_row_basis(const Mat& J, Eigen::Index rank) {
  Mat basis(J.cols(), rank);
  Eigen::Index found = 0;
  double scale = J.norm();
  for (Eigen::Index i = 0; i < J.rows() && found < rank; ++i) {
    Vec w = J.row(i).transpose();
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index b = 0; b < found; ++b) w -= basis.col(b).dot(w) * basis.col(b);
    double nw = w.norm();
    if (nw > 1e-10 * std::max(scale, 1.0)) basis.col(found++) = w / nw;
  }
  if (found < rank) throw SolverError("constraint rows are rank deficient");
  return basis;
}

Vec ConstrainedCritical::residual(const Vec& z, const Vec& nu, const Vec* shift) const {
  const auto E = static_cast<Eigen::Index>(F_.num_eqs());
  const auto D = static_cast<Eigen::Index>(F_.num_vars());
  Vec r(E + D);
  r.head(E) = F_.evaluate(z);
  Vec g = phi_.gradient(z);
  if (shift) g += *shift;
  r.tail(D) = g - F_.jacobian(z).transpose() * nu;
  return r;
}

Vec ConstrainedCritical::multipliers(const Vec& z, const Vec* shift) const {
  Vec g = phi_.gradient(z);
  if (shift) g += *shift;
  if (F_.num_eqs() == 0) return Vec();
  return min_norm_step(F_.jacobian(z).transpose(), g);
}

ConstrainedCritical::Point ConstrainedCritical::solve(const Vec& z0, const Vec* shift,
                                                      const NewtonOptions& opt) const {
  const auto E = static_cast<Eigen::Index>(F_.num_eqs());
  const auto D = static_cast<Eigen::Index>(F_.num_vars());
  Vec w(D + E);
  w.head(D) = z0;
  w.tail(E) = multipliers(z0, shift);
  auto res = [&](const Vec& v) { return residual(v.head(D), v.tail(E), shift); };
  auto jac = [&](const Vec& v) {
    Vec z = v.head(D), nu = v.tail(E);
    Mat J = F_.jacobian(z);
    Mat K = Mat::Zero(E + D, D + E);
    K.topLeftCorner(E, D) = J;
    Mat H = phi_.hessian(z);
    if (E > 0) H -= F_.weighted_hessian(z, nu);
    K.bottomLeftCorner(D, D) = H;
    K.bottomRightCorner(D, E) = -J.transpose();
    return K;
  };
  NewtonResult r = damped_newton(res, jac, w, opt);
  Point p;
  p.z = r.z.head(D);
  p.nu = r.z.tail(E);
  p.converged = r.converged;
  p.residual = r.residual;
  return p;
}

Mat ConstrainedCritical::tangent_basis(const Vec& z) const {
  auto nullity = static_cast<Eigen::Index>(F_.num_vars() - F_.num_eqs());
  if (F_.num_eqs() == 0) return Mat::Identity(nullity, nullity);
  return canonical_null_basis(F_.jacobian(z), nullity);
}

Vec ConstrainedCritical::tangent_gradient(const Vec& z, const Vec* shift) const {
  Vec g = phi_.gradient(z);
  if (shift) g += *shift;
  Mat T = tangent_basis(z);
  return T * (T.transpose() * g);
}

Mat ConstrainedCritical::reduced_hessian(const Vec& z, const Vec& nu, const Mat& basis) const {
  Mat H = phi_.hessian(z);
  if (F_.num_eqs() > 0) H -= F_.weighted_hessian(z, nu);
  Mat R = basis.transpose() * H * basis;
  return 0.5 * (R + R.transpose());
}

Inertia inertia(const Mat& sym, double rel_zero) {
  Inertia in;
  if (sym.rows() == 0) return in;
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  const Vec& ev = es.eigenvalues();
  in.max_abs = ev.cwiseAbs().maxCoeff();
  in.min_abs = ev.cwiseAbs().minCoeff();
  double cut = rel_zero * std::max(in.max_abs, 1.0);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev[i]) < cut) ++in.n_zero;
    else if (ev[i] > 0) ++in.n_plus;
    else ++in.n_minus;
  }
  return in;
}

int det_sign(const Mat& sym, double rel_zero) {
  Inertia in = inertia(sym, rel_zero);
  if (in.n_zero > 0) return 0;
  return (in.n_minus % 2 == 0) ? 1 : -1;
}

}  // namespace morin
