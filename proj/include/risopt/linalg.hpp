// risopt — statistical-CSI resource allocation for RIS-assisted MIMO uplink
// Copyright (C) 2026 The risopt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RISOPT_LINALG_HPP
#define RISOPT_LINALG_HPP

#include <armadillo>
#include <cmath>
#include <stdexcept>

namespace risopt {

inline arma::cx_mat hermitize(const arma::cx_mat& m) { return 0.5 * (m + m.t()); }

/// log2 det(X) for Hermitian positive-definite X, via Cholesky. Never forms
/// the determinant as a product.
inline double log2det_hpd(const arma::cx_mat& x) {
    arma::cx_mat r;
    if (!arma::chol(r, hermitize(x)))
        throw std::runtime_error("log2det_hpd: matrix is not positive definite");
    double acc = 0.0;
    for (arma::uword i = 0; i < r.n_rows; ++i) acc += std::log2(std::real(r(i, i)));
    return 2.0 * acc;
}

/// log2 det(I + X) for Hermitian PSD X; the argument is always nonsingular.
inline double log2det_eye_plus(const arma::cx_mat& x) {
    return log2det_hpd(arma::cx_mat(arma::eye<arma::cx_mat>(x.n_rows, x.n_cols) + x));
}

/// Hermitian PSD square root. Eigenvalues below 1e-12 * lambda_max are
/// clamped to zero before the element-wise square root.
inline arma::cx_mat psd_sqrt(const arma::cx_mat& a) {
    if (a.n_rows != a.n_cols) throw std::invalid_argument("psd_sqrt: matrix must be square");
    const double scale = arma::norm(a, "fro");
    if (scale > 0.0 && arma::norm(a - a.t(), "fro") > 1e-8 * scale)
        throw std::invalid_argument("psd_sqrt: matrix is materially non-Hermitian");
    arma::vec eval;
    arma::cx_mat evec;
    if (!arma::eig_sym(eval, evec, hermitize(a)))
        throw std::runtime_error("psd_sqrt: eigendecomposition failed");
    const double lam_max = eval.empty() ? 0.0 : eval.max();
    arma::vec root(eval.n_elem);
    for (arma::uword i = 0; i < eval.n_elem; ++i)
        root(i) = (eval(i) < 1e-12 * lam_max) ? 0.0 : std::sqrt(eval(i));
    return hermitize(evec * arma::diagmat(root) * evec.t());
}

/// Largest eigenvalue of a Hermitian matrix. Full eigendecomposition up to
/// dense_threshold; power iteration with a +1% safety margin above (valid
/// for PSD input), so the return value still dominates the spectrum when the
/// iteration stops early.
inline double lambda_max_hermitian(const arma::cx_mat& s, arma::uword dense_threshold = 512) {
    if (s.n_rows != s.n_cols) throw std::invalid_argument("lambda_max_hermitian: matrix must be square");
    if (s.n_rows <= dense_threshold) {
        arma::vec eval;
        if (!arma::eig_sym(eval, hermitize(s)))
            throw std::runtime_error("lambda_max_hermitian: eigendecomposition failed");
        return eval.max();
    }
    const arma::uword n = s.n_rows;
    arma::cx_vec v(n);
    for (arma::uword i = 0; i < n; ++i)
        v(i) = std::complex<double>(1.0 + 1e-3 * static_cast<double>(i % 97), 1e-3 * static_cast<double>(i % 89));
    v /= arma::norm(v);
    double lam = 0.0;
    for (int it = 0; it < 10000; ++it) {
        const arma::cx_vec w = s * v;
        const double nw = arma::norm(w);
        if (nw == 0.0) return 0.0;
        const double lam_new = std::real(arma::cdot(v, w));
        v = w / nw;
        if (it > 0 && std::abs(lam_new - lam) <= 1e-10 * std::max(1.0, std::abs(lam_new))) {
            lam = lam_new;
            break;
        }
        lam = lam_new;
    }
    return lam * 1.01;
}

} // namespace risopt

#endif // RISOPT_LINALG_HPP
