#pragma once

#include <complex>

#include <Eigen/Dense>

#include "qrouter/errors.hpp"

namespace qrouter {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Kronecker product, row-index convention C(i*p+k, j*q+l) = A(i,j) B(k,l).
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            c.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return c;
}

struct EigenSystem {
    RVector values;   // descending
    CMatrix vectors;  // columns, same order as values
};

inline double max_asymmetry(const CMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// Hermitian eigendecomposition, eigenvalues in decreasing order.
// The input is symmetrized as (m + m^dag)/2 before solving; asymmetry
// beyond 1e-6 is treated as a caller bug.
inline EigenSystem herm_eig(const CMatrix& m) {
    if (m.rows() != m.cols()) throw Error("herm_eig: matrix not square");
    if (max_asymmetry(m) > 1e-6)
        throw NonHermitianInput("herm_eig: asymmetry exceeds 1e-6");
    CMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw Error("herm_eig: eigensolver failed to converge");
    EigenSystem out;
    const Eigen::Index n = m.rows();
    out.values = solver.eigenvalues().reverse();
    out.vectors.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        out.vectors.col(j) = solver.eigenvectors().col(n - 1 - j);
    return out;
}

// Principal square root of a positive-semidefinite Hermitian matrix.
// Round-off negatives in (-1e-6, 0) are clamped to zero; anything below
// -1e-6 means the matrix is genuinely indefinite.
inline CMatrix psd_sqrt(const CMatrix& m) {
    EigenSystem es = herm_eig(m);
    RVector w = es.values;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w[i] < -1e-6)
            throw NegativeSpectrum("psd_sqrt: eigenvalue below -1e-6");
        if (w[i] < 0.0) w[i] = 0.0;
    }
    return es.vectors * w.cwiseSqrt().asDiagonal() * es.vectors.adjoint();
}

// Column-stacking vectorization and its inverse.
inline CVector vec(const CMatrix& m) {
    return Eigen::Map<const CVector>(m.data(), m.size());
}

inline CMatrix unvec(const CVector& v, Eigen::Index rows, Eigen::Index cols) {
    if (rows * cols != v.size()) throw Error("unvec: size mismatch");
    return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

inline CMatrix unvec(const CVector& v) {
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(double(v.size()))));
    if (n * n != v.size()) throw Error("unvec: length is not a perfect square");
    return unvec(v, n, n);
}

// vec(A rho) = superop_left(A) vec(rho);  vec(rho A) = superop_right(A) vec(rho).
inline CMatrix superop_left(const CMatrix& a) {
    return kron(CMatrix::Identity(a.cols(), a.cols()), a);
}

inline CMatrix superop_right(const CMatrix& a) {
    return kron(a.transpose(), CMatrix::Identity(a.rows(), a.rows()));
}

}  // namespace qrouter
