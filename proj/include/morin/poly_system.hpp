#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "morin/expr.hpp"

namespace morin {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline std::span<const double> as_span(const Vec& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

/// A scalar polynomial with its symbolic gradient and Hessian precomputed.
class PolyFunction {
 public:
  PolyFunction() = default;
  explicit PolyFunction(Expr e);

  std::size_t num_vars() const { return expr_.ambient_dim(); }
  const Expr& expr() const { return expr_; }
  double value(const Vec& z) const { return expr_.evaluate(as_span(z)); }
  Vec gradient(const Vec& z) const;
  Mat hessian(const Vec& z) const;

 private:
  Expr expr_;
  std::vector<Expr> grad_;
  std::vector<std::vector<Expr>> hess_;  // lower triangle, hess_[i][j] for j <= i
};

/// A system F: R^D -> R^E of polynomials with symbolic Jacobian and (optional)
/// second derivatives.
class PolySystem {
 public:
  PolySystem() = default;
  PolySystem(std::vector<Expr> equations, std::size_t nvars, bool with_hessians = true);

  std::size_t num_vars() const { return nvars_; }
  std::size_t num_eqs() const { return eqs_.size(); }
  const std::vector<Expr>& equations() const { return eqs_; }

  Vec evaluate(const Vec& z) const;
  Mat jacobian(const Vec& z) const;
  /// sum_i w_i * Hess F_i(z).
  Mat weighted_hessian(const Vec& z, const Vec& w) const;

 private:
  std::size_t nvars_ = 0;
  std::vector<Expr> eqs_;
  std::vector<std::vector<Expr>> jac_;
  std::vector<std::vector<std::vector<Expr>>> hess_;
};

struct NewtonOptions {
  int max_iters = 60;
  double residual_tol = 1e-12;
  double step_tol = 1e-15;
};

struct NewtonResult {
  Vec z;
  bool converged = false;
  double residual = 0.0;
  int iterations = 0;
};

/// Minimum-norm Gauss-Newton for F(z) = 0. Works for square and
/// underdetermined systems; with backtracking on |F|.
NewtonResult solve_min_norm(const PolySystem& F, Vec z0, const NewtonOptions& opt = {});

/// Same, with extra affine equations  A (z - z_ref) = 0 appended (used for
/// pseudo-arclength correction and slicing).
NewtonResult solve_min_norm_sliced(const PolySystem& F, Vec z0, const Mat& A, const Vec& z_ref,
                                   const NewtonOptions& opt = {});

/// Orthonormal basis (columns) of ker J for the given expected nullity.
/// Canonical: coordinate vectors projected onto the kernel, Gram-Schmidt
/// in index order, so the result does not depend on SVD sign conventions.
Mat canonical_null_basis(const Mat& J, Eigen::Index nullity);

/// Orthonormal basis of the row space of J, Gram-Schmidt over rows in order.
Mat canonical_row_basis(const Mat& J, Eigen::Index rank);

/// Singular values of J, descending.
Vec singular_values(const Mat& J);

/// Critical points of a polynomial phi restricted to {F = 0}, via the
/// Lagrange system  F(z) = 0,  grad phi(z) + shift = J(z)^T nu.
/// `shift` is a constant covector added to grad phi (a linear perturbation).
class ConstrainedCritical {
 public:
  ConstrainedCritical(const PolySystem& F, const PolyFunction& phi) : F_(F), phi_(phi) {}

  struct Point {
    Vec z;
    Vec nu;
    bool converged = false;
    double residual = 0.0;
  };

  Point solve(const Vec& z0, const Vec* shift = nullptr, const NewtonOptions& opt = {}) const;

  /// Least-squares multipliers at z.
  Vec multipliers(const Vec& z, const Vec* shift = nullptr) const;

  /// Orthonormal tangent basis of {F = 0} at z (nullity D - E).
  Mat tangent_basis(const Vec& z) const;

  /// Projection of grad phi (+ shift) onto the tangent space.
  Vec tangent_gradient(const Vec& z, const Vec* shift = nullptr) const;

  /// Hessian of phi on the manifold at a critical point, in `basis`.
  Mat reduced_hessian(const Vec& z, const Vec& nu, const Mat& basis) const;

  const PolySystem& system() const { return F_; }
  const PolyFunction& function() const { return phi_; }

 private:
  Vec residual(const Vec& z, const Vec& nu, const Vec* shift) const;

  const PolySystem& F_;
  const PolyFunction& phi_;
};

struct Inertia {
  int n_plus = 0;
  int n_minus = 0;
  int n_zero = 0;
  double min_abs = 0.0;  ///< smallest |eigenvalue|
  double max_abs = 0.0;  ///< largest |eigenvalue|
};

/// Eigenvalue sign counts of a symmetric matrix. An eigenvalue counts as
/// zero when |ev| < rel_zero * max(largest |ev|, 1).
Inertia inertia(const Mat& sym, double rel_zero);

/// Sign of det(sym) from its eigenvalues; 0 when singular at the threshold.
int det_sign(const Mat& sym, double rel_zero);

}  // namespace morin
