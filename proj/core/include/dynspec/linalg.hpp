#pragma once

#include <cstddef>
#include <vector>

#include "dynspec/errors.hpp"

namespace dynspec {

using Vec = std::vector<double>;

/// Dense row-major matrix, just large enough for desk-scale systems.
class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, fill) {}

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  const std::vector<double>& data() const { return a_; }

 private:
  int rows_, cols_;
  std::vector<double> a_;
};

Vec mat_apply(const Mat& m, const Vec& v);
Vec mat_apply_transpose(const Mat& m, const Vec& v);
Mat matmul(const Mat& a, const Mat& b);
Mat matpow(const Mat& a, int n);

double sup_norm(const Vec& v);
double l1_norm(const Vec& v);
double dot(const Vec& a, const Vec& b);
void scale(Vec& v, double s);

/// Total-variation distance between probability vectors (half the L1 distance).
double tv_distance(const Vec& a, const Vec& b);

/// Solves a x = b by Gaussian elimination with partial pivoting.
Vec solve_linear(Mat a, Vec b);

/// Euclidean projection onto the probability simplex.
Vec project_to_simplex(Vec v);

}  // namespace dynspec
