#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace gwt {

using Cplx   = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Dense complex 3-order tensor, mode-1-fastest storage:
/// element (i1,i2,i3) lives at linear index i1 + d1*(i2 + d2*i3).
///
/// With this layout the mode-1 matricization is a zero-copy view of the
/// buffer, and frontal slices (:,:,i3) are contiguous d1 x d2 blocks.
/// Tensors are treated as immutable after construction; concurrent reads
/// are safe.
class Tensor3 {
public:
    Tensor3() = default;
    Tensor3(int d1, int d2, int d3);

    int dim1() const { return d1_; }
    int dim2() const { return d2_; }
    int dim3() const { return d3_; }
    int dim(int mode) const;                 // mode in {1,2,3}
    std::array<int, 3> dims() const { return {d1_, d2_, d3_}; }
    std::size_t size() const { return data_.size(); }

    Cplx& operator()(int i1, int i2, int i3) {
        return data_[static_cast<std::size_t>(i1) + static_cast<std::size_t>(d1_) * (i2 + static_cast<std::size_t>(d2_) * i3)];
    }
    const Cplx& operator()(int i1, int i2, int i3) const {
        return data_[static_cast<std::size_t>(i1) + static_cast<std::size_t>(d1_) * (i2 + static_cast<std::size_t>(d2_) * i3)];
    }

    const Cplx* data() const { return data_.data(); }
    Cplx* data() { return data_.data(); }

    /// Zero-copy mode-1 unfolding, d1 x (d2*d3).
    Eigen::Map<const Matrix> mode1_view() const;
    /// Zero-copy frontal slice (:,:,i3), d1 x d2.
    Eigen::Map<const Matrix> slice_view(int i3) const;

    bool same_dims(const Tensor3& other) const {
        return d1_ == other.d1_ && d2_ == other.d2_ && d3_ == other.d3_;
    }

    void setZero();

private:
    int d1_ = 0, d2_ = 0, d3_ = 0;
    std::vector<Cplx> data_;
};

/// Mode-n unfolding. Mode 1 gives d1 x (d2*d3) with column i2 + d2*i3;
/// modes 2 and 3 put the mode index on rows and order the remaining
/// indices with the lower original mode varying fastest.
Matrix matricize(const Tensor3& x, int mode);

/// Inverse of matricize for the given target dims.
Tensor3 dematricize(const Matrix& m, int mode, const std::array<int, 3>& dims);

/// Y = X x_mode U, i.e. Y_(mode) = U * X_(mode). U must have
/// cols == dim(mode); the mode size becomes U.rows().
Tensor3 mode_product(const Tensor3& x, const Matrix& u, int mode);

/// M x N matrix with entry (i1,i2) = sum_i3 X(i1,i2,i3) * conj(c_(i3)).
Matrix contract_mode3(const Tensor3& x, const Vector& coeff);

/// sum_i x_i * conj(y_i) over identical dims.
Cplx inner(const Tensor3& x, const Tensor3& y);

double squared_norm(const Tensor3& x);
double frobenius_norm(const Tensor3& x);

}  // namespace gwt
