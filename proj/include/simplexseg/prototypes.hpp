#pragma once

#include <string>
#include <vector>

namespace simplexseg {

/// N maximally separated unit vectors in R^(N-1): the vertices of a regular
/// simplex centred on the origin. Column c is the prototype of class c.
struct PrototypeMatrix {
  int num_classes = 0;          // N
  std::vector<double> columns;  // N columns of length N-1, column-contiguous

  int dim() const { return num_classes - 1; }

  const double* column(int c) const {
    return columns.data() + static_cast<std::size_t>(c) * dim();
  }
  double* column(int c) {
    return columns.data() + static_cast<std::size_t>(c) * dim();
  }
};

/// Builds the prototype matrix by the recursion
///   P_1 = (1  -1),
///   P_k = [ 1   -(1/k)*1^T            ]
///         [ 0   sqrt(1-1/k^2)*P_{k-1} ]
/// evaluated in double precision with no re-normalization pass. Deterministic:
/// equal num_classes gives bit-identical matrices.
/// Throws std::invalid_argument for num_classes < 2.
PrototypeMatrix build_prototypes(int num_classes);

/// Checks the simplex invariants: unit column norms, pairwise dot products
/// equal to -1/(N-1), and zero column sum. Returns one description per
/// violation, naming the offending column or pair and the measured value;
/// empty means the matrix is a valid simplex. Default tolerances are the
/// in-memory contract; matrices that round-tripped through the binary32
/// tensor format need them relaxed to ~1e-5.
std::vector<std::string> validate_prototypes(const PrototypeMatrix& p,
                                             double norm_tol = 1e-12,
                                             double dot_tol = 1e-12,
                                             double sum_tol = 1e-10);

}  // namespace simplexseg
