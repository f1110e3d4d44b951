#pragma once

#include <Eigen/Dense>

namespace dbwave {

/// Tridiagonal matrix stored by diagonals. `lower[i]` is entry (i+1, i),
/// `upper[i]` is entry (i, i+1).
struct Tridiag {
  Eigen::VectorXd lower;
  Eigen::VectorXd diag;
  Eigen::VectorXd upper;

  Tridiag() = default;
  explicit Tridiag(Eigen::Index n)
      : lower(Eigen::VectorXd::Zero(n > 0 ? n - 1 : 0)),
        diag(Eigen::VectorXd::Zero(n)),
        upper(Eigen::VectorXd::Zero(n > 0 ? n - 1 : 0)) {}

  Eigen::Index size() const { return diag.size(); }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  /// x^T A y.
  double form(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  Eigen::MatrixXd dense() const;

  Tridiag& operator+=(const Tridiag& other);
  Tridiag& operator*=(double s);
};

Tridiag operator+(Tridiag a, const Tridiag& b);
Tridiag operator*(double s, Tridiag a);

/// Direct solve with partial pivoting (LAPACK gtsv). Throws
/// std::runtime_error on an exactly singular pivot.
Eigen::VectorXd solve(const Tridiag& a, const Eigen::VectorXd& rhs);

}  // namespace dbwave
