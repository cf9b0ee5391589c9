#pragma once

// Thin wrappers over the LAPACK symmetric/Hermitian eigensolvers.

#include <complex>

#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#include <lapacke.h>

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace qbattery::detail {

// Full spectrum of a real symmetric matrix (divide and conquer).
// On return `a` holds the eigenvectors, ascending order.
inline Eigen::VectorXd syevd(Eigen::MatrixXd& a) {
    const auto n = static_cast<lapack_int>(a.rows());
    Eigen::VectorXd w(n);
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, w.data());
    if (info != 0)
        throw std::runtime_error("dsyevd failed with info=" + std::to_string(info));
    return w;
}

inline Eigen::VectorXd heevd(Eigen::MatrixXcd& a) {
    const auto n = static_cast<lapack_int>(a.rows());
    Eigen::VectorXd w(n);
    const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, w.data());
    if (info != 0)
        throw std::runtime_error("zheevd failed with info=" + std::to_string(info));
    return w;
}

// Lowest `k` eigenpairs of a real symmetric matrix. `a` is destroyed.
inline Eigen::VectorXd syevr_lowest(Eigen::MatrixXd& a, int k, Eigen::MatrixXd& vectors) {
    const auto n = static_cast<lapack_int>(a.rows());
    Eigen::VectorXd w(n);
    vectors.resize(n, k);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(k));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, a.data(), n, 0.0, 0.0, 1, k,
                                           0.0, &found, w.data(), vectors.data(), n, support.data());
    if (info != 0 || found != k)
        throw std::runtime_error("dsyevr failed with info=" + std::to_string(info));
    return w.head(k);
}

inline Eigen::VectorXd heevr_lowest(Eigen::MatrixXcd& a, int k, Eigen::MatrixXcd& vectors) {
    const auto n = static_cast<lapack_int>(a.rows());
    Eigen::VectorXd w(n);
    vectors.resize(n, k);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(k));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, a.data(), n, 0.0, 0.0, 1, k,
                                           0.0, &found, w.data(), vectors.data(), n, support.data());
    if (info != 0 || found != k)
        throw std::runtime_error("zheevr failed with info=" + std::to_string(info));
    return w.head(k);
}

}  // namespace qbattery::detail
