#include "gwtucker/tensor.hpp"

#include <stdexcept>
#include <string>

namespace gwt {

Tensor3::Tensor3(int d1, int d2, int d3) : d1_(d1), d2_(d2), d3_(d3) {
    if (d1 <= 0 || d2 <= 0 || d3 <= 0)
        throw std::invalid_argument("Tensor3: dims must be positive, got (" + std::to_string(d1) +
                                    "," + std::to_string(d2) + "," + std::to_string(d3) + ")");
    data_.assign(static_cast<std::size_t>(d1) * d2 * d3, Cplx(0.0, 0.0));
}

int Tensor3::dim(int mode) const {
    switch (mode) {
        case 1: return d1_;
        case 2: return d2_;
        case 3: return d3_;
        default: throw std::invalid_argument("Tensor3::dim: mode must be 1, 2 or 3, got " + std::to_string(mode));
    }
}

Eigen::Map<const Matrix> Tensor3::mode1_view() const {
    return Eigen::Map<const Matrix>(data_.data(), d1_, static_cast<Eigen::Index>(d2_) * d3_);
}

Eigen::Map<const Matrix> Tensor3::slice_view(int i3) const {
    return Eigen::Map<const Matrix>(data_.data() + static_cast<std::size_t>(d1_) * d2_ * i3, d1_, d2_);
}

void Tensor3::setZero() {
    std::fill(data_.begin(), data_.end(), Cplx(0.0, 0.0));
}

Matrix matricize(const Tensor3& x, int mode) {
    const int d1 = x.dim1(), d2 = x.dim2(), d3 = x.dim3();
    switch (mode) {
        case 1:
            return x.mode1_view();
        case 2: {
            Matrix m(d2, static_cast<Eigen::Index>(d1) * d3);
            for (int i3 = 0; i3 < d3; ++i3)
                for (int i2 = 0; i2 < d2; ++i2)
                    for (int i1 = 0; i1 < d1; ++i1)
                        m(i2, i1 + static_cast<Eigen::Index>(d1) * i3) = x(i1, i2, i3);
            return m;
        }
        case 3: {
            Matrix m(d3, static_cast<Eigen::Index>(d1) * d2);
            for (int i3 = 0; i3 < d3; ++i3)
                for (int i2 = 0; i2 < d2; ++i2)
                    for (int i1 = 0; i1 < d1; ++i1)
                        m(i3, i1 + static_cast<Eigen::Index>(d1) * i2) = x(i1, i2, i3);
            return m;
        }
        default:
            throw std::invalid_argument("matricize: mode must be 1, 2 or 3, got " + std::to_string(mode));
    }
}

Tensor3 dematricize(const Matrix& m, int mode, const std::array<int, 3>& dims) {
    const int d1 = dims[0], d2 = dims[1], d3 = dims[2];
    Tensor3 x(d1, d2, d3);
    switch (mode) {
        case 1:
            if (m.rows() != d1 || m.cols() != static_cast<Eigen::Index>(d2) * d3)
                throw std::invalid_argument("dematricize: matrix shape does not match mode-1 dims");
            for (int i3 = 0; i3 < d3; ++i3)
                for (int i2 = 0; i2 < d2; ++i2)
                    for (int i1 = 0; i1 < d1; ++i1)
                        x(i1, i2, i3) = m(i1, i2 + static_cast<Eigen::Index>(d2) * i3);
            return x;
        case 2:
            if (m.rows() != d2 || m.cols() != static_cast<Eigen::Index>(d1) * d3)
                throw std::invalid_argument("dematricize: matrix shape does not match mode-2 dims");
            for (int i3 = 0; i3 < d3; ++i3)
                for (int i2 = 0; i2 < d2; ++i2)
                    for (int i1 = 0; i1 < d1; ++i1)
                        x(i1, i2, i3) = m(i2, i1 + static_cast<Eigen::Index>(d1) * i3);
            return x;
        case 3:
            if (m.rows() != d3 || m.cols() != static_cast<Eigen::Index>(d1) * d2)
                throw std::invalid_argument("dematricize: matrix shape does not match mode-3 dims");
            for (int i3 = 0; i3 < d3; ++i3)
                for (int i2 = 0; i2 < d2; ++i2)
                    for (int i1 = 0; i1 < d1; ++i1)
                        x(i1, i2, i3) = m(i3, i1 + static_cast<Eigen::Index>(d1) * i2);
            return x;
        default:
            throw std::invalid_argument("dematricize: mode must be 1, 2 or 3, got " + std::to_string(mode));
    }
}

Tensor3 mode_product(const Tensor3& x, const Matrix& u, int mode) {
    if (mode < 1 || mode > 3)
        throw std::invalid_argument("mode_product: mode must be 1, 2 or 3, got " + std::to_string(mode));
    if (u.cols() != x.dim(mode))
        throw std::invalid_argument("mode_product: matrix has " + std::to_string(u.cols()) +
                                    " cols but tensor mode " + std::to_string(mode) + " has size " +
                                    std::to_string(x.dim(mode)));

    std::array<int, 3> out_dims = x.dims();
    out_dims[mode - 1] = static_cast<int>(u.rows());

    if (mode == 1) {
        // Result of U * X_(1) is already in mode-1-fastest layout.
        Matrix y = u * x.mode1_view();
        Tensor3 out(out_dims[0], out_dims[1], out_dims[2]);
        std::copy(y.data(), y.data() + y.size(), out.data());
        return out;
    }
    return dematricize(u * matricize(x, mode), mode, out_dims);
}

Matrix contract_mode3(const Tensor3& x, const Vector& coeff) {
    if (coeff.size() != x.dim3())
        throw std::invalid_argument("contract_mode3: coefficient length " + std::to_string(coeff.size()) +
                                    " does not match mode-3 size " + std::to_string(x.dim3()));
    Matrix h = Matrix::Zero(x.dim1(), x.dim2());
    for (int i3 = 0; i3 < x.dim3(); ++i3)
        h += std::conj(coeff(i3)) * x.slice_view(i3);
    return h;
}

Cplx inner(const Tensor3& x, const Tensor3& y) {
    if (!x.same_dims(y))
        throw std::invalid_argument("inner: tensor dims differ");
    Cplx acc(0.0, 0.0);
    const Cplx* xp = x.data();
    const Cplx* yp = y.data();
    for (std::size_t i = 0; i < x.size(); ++i)
        acc += xp[i] * std::conj(yp[i]);
    return acc;
}

double squared_norm(const Tensor3& x) {
    double acc = 0.0;
    const Cplx* xp = x.data();
    for (std::size_t i = 0; i < x.size(); ++i)
        acc += std::norm(xp[i]);
    return acc;
}

double frobenius_norm(const Tensor3& x) {
    return std::sqrt(squared_norm(x));
}

}  // namespace gwt
