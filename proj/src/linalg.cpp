#include "dbwave/linalg.hpp"

#include <lapacke.h>

#include <stdexcept>

namespace dbwave {

Eigen::VectorXd Tridiag::apply(const Eigen::VectorXd& x) const {
  const Eigen::Index n = size();
  Eigen::VectorXd y = diag.cwiseProduct(x);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    y[i] += upper[i] * x[i + 1];
    y[i + 1] += lower[i] * x[i];
  }
  return y;
}

double Tridiag::form(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  return x.dot(apply(y));
}

Eigen::MatrixXd Tridiag::dense() const {
  const Eigen::Index n = size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) a(i, i) = diag[i];
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    a(i, i + 1) = upper[i];
    a(i + 1, i) = lower[i];
  }
  return a;
}

Tridiag& Tridiag::operator+=(const Tridiag& other) {
  lower += other.lower;
  diag += other.diag;
  upper += other.upper;
  return *this;
}

Tridiag& Tridiag::operator*=(double s) {
  lower *= s;
  diag *= s;
  upper *= s;
  return *this;
}

Tridiag operator+(Tridiag a, const Tridiag& b) { return a += b; }
Tridiag operator*(double s, Tridiag a) { return a *= s; }

Eigen::VectorXd solve(const Tridiag& a, const Eigen::VectorXd& rhs) {
  const auto n = static_cast<lapack_int>(a.size());
  Eigen::VectorXd dl = a.lower;
  Eigen::VectorXd d = a.diag;
  Eigen::VectorXd du = a.upper;
  Eigen::VectorXd x = rhs;
  const lapack_int info =
      LAPACKE_dgtsv(LAPACK_COL_MAJOR, n, 1, dl.data(), d.data(), du.data(), x.data(), n);
  if (info != 0) throw std::runtime_error("tridiagonal solve failed: singular pivot");
  return x;
}

}  // namespace dbwave
