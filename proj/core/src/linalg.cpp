#include "dynspec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dynspec {

Vec mat_apply(const Mat& m, const Vec& v) {
  if (static_cast<int>(v.size()) != m.cols()) throw DimensionError("apply: size mismatch");
  Vec out(m.rows(), 0.0);
  for (int i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

Vec mat_apply_transpose(const Mat& m, const Vec& v) {
  if (static_cast<int>(v.size()) != m.rows()) throw DimensionError("apply_transpose: size mismatch");
  Vec out(m.cols(), 0.0);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out[j] += m(i, j) * v[i];
  return out;
}

Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: size mismatch");
  Mat c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Mat matpow(const Mat& a, int n) {
  if (a.rows() != a.cols()) throw DimensionError("matpow: not square");
  if (n < 0) throw DomainError("matpow: negative exponent");
  Mat r = Mat::identity(a.rows());
  for (int i = 0; i < n; ++i) r = matmul(r, a);
  return r;
}

double sup_norm(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double l1_norm(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("dot: size mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void scale(Vec& v, double s) {
  for (double& x : v) x *= s;
}

double tv_distance(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("tv_distance: size mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

Vec solve_linear(Mat a, Vec b) {
  const int n = a.rows();
  if (a.cols() != n || static_cast<int>(b.size()) != n)
    throw DimensionError("solve_linear: size mismatch");
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) < 1e-300) throw DomainError("solve_linear: singular matrix");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
      std::swap(b[col], b[piv]);
    }
    const double d = a(col, col);
    for (int r = col + 1; r < n; ++r) {
      const double f = a(r, col) / d;
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
      b[r] -= f * b[col];
    }
  }
  Vec x(n);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int j = r + 1; j < n; ++j) s -= a(r, j) * x[j];
    x[r] = s / a(r, r);
  }
  return x;
}

Vec project_to_simplex(Vec v) {
  // Sort-based projection onto {w >= 0, sum w = 1}.
  Vec u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0;
  double theta = 0.0;
  int rho = 0;
  for (size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    const double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) {
      rho = static_cast<int>(i + 1);
      theta = t;
    }
  }
  (void)rho;
  for (double& x : v) x = std::max(0.0, x - theta);
  return v;
}

}  // namespace dynspec
