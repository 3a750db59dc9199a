#include "simplexseg/prototypes.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <stdexcept>

namespace simplexseg {
namespace {

std::string format_violation(const char* fmt, ...) {
  char buf[160];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

}  // namespace

PrototypeMatrix build_prototypes(int num_classes) {
  if (num_classes < 2) {
    throw std::invalid_argument(
        "build_prototypes: num_classes must be >= 2 (a 1-class simplex is "
        "degenerate)");
  }

  // P_1 = (1 -1): two opposed points on the 0-sphere.
  std::vector<double> cols = {1.0, -1.0};
  int dim = 1;

  // P_k = [ 1  -(1/k) 1^T ; 0  sqrt(1-1/k^2) P_{k-1} ], column-contiguous.
  for (int k = 2; k <= num_classes - 1; ++k) {
    const double shrink = std::sqrt(1.0 - 1.0 / (static_cast<double>(k) * k));
    const double top = -1.0 / static_cast<double>(k);
    std::vector<double> next(static_cast<std::size_t>(k) * (k + 1), 0.0);
    next[0] = 1.0;  // column 0 is e_1; rows 1.. stay zero
    for (int c = 1; c <= k; ++c) {
      double* dst = next.data() + static_cast<std::size_t>(c) * k;
      const double* src = cols.data() + static_cast<std::size_t>(c - 1) * dim;
      dst[0] = top;
      for (int r = 0; r < dim; ++r) dst[r + 1] = shrink * src[r];
    }
    cols = std::move(next);
    dim = k;
  }

  PrototypeMatrix p;
  p.num_classes = num_classes;
  p.columns = std::move(cols);
  return p;
}

std::vector<std::string> validate_prototypes(const PrototypeMatrix& p,
                                              double norm_tol, double dot_tol,
                                              double sum_tol) {
  std::vector<std::string> violations;
  const int n = p.num_classes;
  const int dim = p.dim();
  if (n < 2 || p.columns.size() != static_cast<std::size_t>(n) * dim) {
    violations.push_back(format_violation(
        "shape: expected %d columns of dimension %d, have %zu values", n, dim,
        p.columns.size()));
    return violations;
  }

  for (int c = 0; c < n; ++c) {
    double sq = 0.0;
    const double* col = p.column(c);
    for (int r = 0; r < dim; ++r) sq += col[r] * col[r];
    const double norm = std::sqrt(sq);
    if (std::abs(norm - 1.0) > norm_tol) {
      violations.push_back(format_violation(
          "norm: column %d has norm %.17g (expected 1)", c, norm));
    }
  }

  const double expected_dot = -1.0 / (n - 1);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double dot = 0.0;
      const double* a = p.column(i);
      const double* b = p.column(j);
      for (int r = 0; r < dim; ++r) dot += a[r] * b[r];
      if (std::abs(dot - expected_dot) > dot_tol) {
        violations.push_back(format_violation(
            "dot: columns (%d,%d) have dot %.17g (expected %.17g)", i, j, dot,
            expected_dot));
      }
    }
  }

  for (int r = 0; r < dim; ++r) {
    double sum = 0.0;
    for (int c = 0; c < n; ++c) sum += p.column(c)[r];
    if (std::abs(sum) > sum_tol) {
      violations.push_back(format_violation(
          "sum: component %d of the column sum is %.17g (expected 0)", r,
          sum));
    }
  }

  return violations;
}

}  // namespace simplexseg
