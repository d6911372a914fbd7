#pragma once

#include <vector>

#include "s3ovs/matrix.hpp"

namespace s3ovs {

std::vector<double> column_means(const Matrix& m);

// Sample covariance (1/(n-1) convention, zero matrix when n < 2).
Matrix covariance(const Matrix& m);

struct EigenDecomposition {
    std::vector<double> values;  // descending
    Matrix vectors;              // column j pairs with values[j], orthonormal
};

// Cyclic Jacobi for a symmetric matrix. Eigenvalues with magnitude below
// 1e-12 * max|eigenvalue| are clamped to zero so rank-deficient covariance
// matrices report zero eigenvalues instead of sign noise.
EigenDecomposition symmetric_eigen(const Matrix& symmetric);

}  // namespace s3ovs
