#include "gwtucker/linalg.hpp"

#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace gwt {

void phase_normalize_columns(Matrix& u) {
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
        Eigen::Index best = 0;
        double best_mag = 0.0;
        for (Eigen::Index r = 0; r < u.rows(); ++r) {
            const double mag = std::abs(u(r, c));
            if (mag > best_mag) {
                best_mag = mag;
                best = r;
            }
        }
        if (best_mag > 0.0)
            u.col(c) *= std::conj(u(best, c)) / best_mag;
    }
}

Matrix leading_eigenvectors(const Matrix& hermitian, int count) {
    if (hermitian.rows() != hermitian.cols())
        throw std::invalid_argument("leading_eigenvectors: matrix is not square");
    if (count < 1 || count > hermitian.rows())
        throw std::invalid_argument("leading_eigenvectors: count " + std::to_string(count) +
                                    " out of range for size " + std::to_string(hermitian.rows()));

    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("leading_eigenvectors: eigendecomposition failed");

    // SelfAdjointEigenSolver orders eigenvalues ascending.
    const Eigen::Index n = hermitian.rows();
    Matrix out(n, count);
    for (int c = 0; c < count; ++c)
        out.col(c) = es.eigenvectors().col(n - 1 - c);
    phase_normalize_columns(out);
    return out;
}

TruncatedSvd truncated_svd(const Matrix& a, int count) {
    const int max_rank = static_cast<int>(std::min(a.rows(), a.cols()));
    if (count < 1 || count > max_rank)
        throw std::invalid_argument("truncated_svd: count " + std::to_string(count) +
                                    " out of range for " + std::to_string(a.rows()) + "x" +
                                    std::to_string(a.cols()) + " matrix");

    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);

    TruncatedSvd out;
    out.u = svd.matrixU().leftCols(count);
    out.v = svd.matrixV().leftCols(count);
    out.singular_values = svd.singularValues().head(count);

    // Phase from v, mirrored onto u to keep u * diag(s) * v^H invariant.
    for (int c = 0; c < count; ++c) {
        Eigen::Index best = 0;
        double best_mag = 0.0;
        for (Eigen::Index r = 0; r < out.v.rows(); ++r) {
            const double mag = std::abs(out.v(r, c));
            if (mag > best_mag) {
                best_mag = mag;
                best = r;
            }
        }
        if (best_mag > 0.0) {
            const Cplx factor = std::conj(out.v(best, c)) / best_mag;
            out.v.col(c) *= factor;
            out.u.col(c) *= factor;
        }
    }
    return out;
}

}  // namespace gwt
