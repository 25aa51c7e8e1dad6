#pragma once

#include "gwtucker/tensor.hpp"

namespace gwt {

/// Scale each column by a unit complex factor so its largest-magnitude
/// entry is real and nonnegative (ties broken by lowest index). Makes
/// eigenvector / singular-vector output deterministic and comparable
/// across runs.
void phase_normalize_columns(Matrix& u);

/// Leading `count` eigenvectors of a Hermitian matrix, columns ordered by
/// descending eigenvalue, phase-normalized.
Matrix leading_eigenvectors(const Matrix& hermitian, int count);

struct TruncatedSvd {
    Matrix u;                         // rows x count
    Eigen::VectorXd singular_values;  // count, non-increasing
    Matrix v;                         // cols x count
};

/// Leading `count` singular triplets of a. Phase is driven by the right
/// singular vectors; the matching left vectors carry the same factor so
/// u * diag(s) * v^H is unchanged.
TruncatedSvd truncated_svd(const Matrix& a, int count);

}  // namespace gwt
