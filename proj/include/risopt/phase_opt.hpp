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
//
// RIS phase optimization for fixed power allocation. The log-det objective
// C(Phi) = log2 det(I + (1/sigma2) H1 Phi A Phi^H H1^H) is maximized through
// the equivalent weighted-MSE minimization h(W, U, phi) = tr(W E) - ln det W,
// handled by block coordinate descent: W and U have closed-form minimizers,
// the unit-modulus phi block is solved by a minorization-maximization scheme
// whose surrogate reduces each step to a phase alignment.

#ifndef RISOPT_PHASE_OPT_HPP
#define RISOPT_PHASE_OPT_HPP

#include <armadillo>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "risopt/de.hpp"
#include "risopt/linalg.hpp"

namespace risopt {

/// Working state of the MSE-equivalent problem.
struct MsePack {
    arma::cx_mat a;        ///< sum_k U2_k diag(omega_k psi_k) U2_k^H, Hermitian PSD
    arma::cx_mat a_half;   ///< Hermitian PSD square root of a
    arma::cx_mat w;        ///< Hermitian PD weight
    arma::cx_mat u;        ///< bs_antennas x ris_elements receiver
    arma::cx_mat e;        ///< Hermitian PSD MSE matrix
};

/// A = sum_k U2_k diag(omega_k psi_k) U2_k^H; Hermitian PSD by construction.
inline arma::cx_mat compute_A(const std::vector<UtChannelStats>& stats,
                              const std::vector<arma::vec>& psi) {
    if (stats.empty()) throw std::invalid_argument("compute_A: no UTs");
    if (stats.size() != psi.size()) throw std::invalid_argument("compute_A: stats/psi size mismatch");
    const arma::uword nr = stats[0].u2.n_rows;
    arma::cx_mat a(nr, nr, arma::fill::zeros);
    for (std::size_t k = 0; k < stats.size(); ++k) {
        const arma::vec w = stats[k].omega * psi[k];
        a += stats[k].u2 * arma::diagmat(w) * stats[k].u2.t();
    }
    return hermitize(a);
}

/// MSE matrix of the hypothetical system y = H1 Phi A^{1/2} x + n:
/// E = (U^H H1 Phi A^{1/2} - I)(.)^H + sigma2 U^H U, symmetrized.
inline arma::cx_mat mse_matrix(const arma::cx_mat& u, const RisBsChannel& h1,
                               const PhaseVector& phi, const arma::cx_mat& a_half,
                               double sigma2) {
    const arma::uword nr = a_half.n_rows;
    const arma::cx_mat r = u.t() * h1.h1 * arma::diagmat(phi.phi) * a_half -
                           arma::eye<arma::cx_mat>(nr, nr);
    return hermitize(r * r.t() + sigma2 * (u.t() * u));
}

/// Closed-form weight update W = E^{-1}. Near-singular E gets a ridge
/// delta = 1e-12 tr(E)/N before inversion; *regularized reports when the
/// ridge was applied.
inline arma::cx_mat bcd_update_W(const arma::cx_mat& e, bool* regularized = nullptr) {
    if (regularized) *regularized = false;
    arma::cx_mat w;
    const double rc = arma::rcond(hermitize(e));
    if (rc < 1e-12 || !arma::inv_sympd(w, hermitize(e))) {
        const double delta = 1e-12 * std::real(arma::trace(e)) / static_cast<double>(e.n_rows);
        if (!arma::inv_sympd(w, hermitize(e) + delta * arma::eye<arma::cx_mat>(e.n_rows, e.n_cols)))
            throw std::runtime_error("bcd_update_W: MSE matrix is numerically singular");
        if (regularized) *regularized = true;
    }
    return hermitize(w);
}

/// Closed-form MMSE receiver U = (sigma2 I + H1 Phi A Phi^H H1^H)^{-1} H1 Phi A^{1/2}.
inline arma::cx_mat bcd_update_U(const RisBsChannel& h1, const PhaseVector& phi,
                                 const arma::cx_mat& a, const arma::cx_mat& a_half,
                                 double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("bcd_update_U: sigma2 must be positive");
    const arma::cx_mat hp = h1.h1 * arma::diagmat(phi.phi);
    const arma::cx_mat cov = hermitize(sigma2 * arma::eye<arma::cx_mat>(h1.h1.n_rows, h1.h1.n_rows) +
                                       hp * a * hp.t());
    arma::cx_mat u;
    if (!arma::solve(u, cov, arma::cx_mat(hp * a_half), arma::solve_opts::likely_sympd))
        throw std::runtime_error("bcd_update_U: Hermitian solve failed");
    return u;
}

/// Quadratic phase objective g(phi) = phi^H S phi - 2 Re{phi^H conj(c)} with
/// S = B .* A^T.
inline double phase_objective(const arma::cx_mat& s, const arma::cx_vec& c, const arma::cx_vec& phi) {
    return std::real(arma::cdot(phi, s * phi)) - 2.0 * std::real(arma::cdot(phi, arma::conj(c)));
}

/// MM minimization of g over unit-modulus phases. Each iteration aligns phi
/// with alpha = (lambda_max I - S) phi + conj(c); the surrogate bound
/// guarantees g never increases. An alpha entry of exactly zero leaves that
/// phase untouched (any phase is optimal for it). Stops when the objective
/// change is <= tol.
inline PhaseVector mm_phase(const arma::cx_mat& a, const arma::cx_mat& b, const arma::cx_vec& c,
                            const PhaseVector& phi0, double tol = 1e-8, int max_iter = 1000,
                            std::vector<double>* g_trace = nullptr) {
    if (!phi0.is_unit_modulus()) throw std::invalid_argument("mm_phase: phi0 must be unit-modulus");
    const arma::cx_mat s = b % a.st();
    const double lam_max = lambda_max_hermitian(s);
    arma::cx_vec phi = phi0.phi;
    double g_prev = phase_objective(s, c, phi);
    if (g_trace) {
        g_trace->clear();
        g_trace->push_back(g_prev);
    }
    for (int it = 0; it < max_iter; ++it) {
        const arma::cx_vec alpha = lam_max * phi - s * phi + arma::conj(c);
        if (!alpha.is_finite()) throw std::runtime_error("mm_phase: non-finite alignment vector");
        for (arma::uword n = 0; n < phi.n_elem; ++n) {
            const double mag = std::abs(alpha(n));
            if (mag > 0.0) phi(n) = alpha(n) / mag;
        }
        const double g = phase_objective(s, c, phi);
        if (g_trace) g_trace->push_back(g);
        const bool done = std::abs(g - g_prev) <= tol;
        g_prev = g;
        if (done) break;
    }
    return {phi};
}

/// Result of one BCD descent on the MSE-equivalent problem.
struct BcdResult {
    PhaseVector phi;
    std::vector<double> h_trace;   ///< tr(W E) - ln det W after each sweep
    bool regularized = false;      ///< ridge applied in some W-update
    int iterations = 0;
};

/// Block coordinate descent over (W, U, phi). W and U start at their
/// closed-form optima for phi0, then each sweep re-optimizes W, U and runs
/// the MM phase step; h = tr(W E) - ln det W is non-increasing across
/// sweeps. The natural-log det matches the W = E^{-1} minimizer exactly; the
/// log base is immaterial to the phi iterates.
inline BcdResult bcd_phase(const RisBsChannel& h1, const arma::cx_mat& a, double sigma2,
                           const PhaseVector& phi0, double tol = 1e-6, int max_iter = 200,
                           double mm_tol = 1e-8, int mm_max_iter = 1000) {
    if (!phi0.is_unit_modulus()) throw std::invalid_argument("bcd_phase: phi0 must be unit-modulus");
    BcdResult res;
    res.phi = phi0;

    MsePack pack;
    pack.a = hermitize(a);
    pack.a_half = psd_sqrt(pack.a);
    pack.u = bcd_update_U(h1, res.phi, pack.a, pack.a_half, sigma2);
    pack.e = mse_matrix(pack.u, h1, res.phi, pack.a_half, sigma2);
    bool ridge = false;
    pack.w = bcd_update_W(pack.e, &ridge);
    res.regularized = res.regularized || ridge;

    auto h_value = [&]() {
        return std::real(arma::trace(pack.w * pack.e)) -
               log2det_hpd(pack.w) * std::numbers::ln2_v<double>;
    };

    res.h_trace.push_back(h_value());

    for (int s = 1; s <= max_iter; ++s) {
        pack.e = mse_matrix(pack.u, h1, res.phi, pack.a_half, sigma2);
        pack.w = bcd_update_W(pack.e, &ridge);
        res.regularized = res.regularized || ridge;
        pack.u = bcd_update_U(h1, res.phi, pack.a, pack.a_half, sigma2);

        const arma::cx_mat b = hermitize(h1.h1.t() * pack.u * pack.w * pack.u.t() * h1.h1);
        const arma::cx_mat c_mat = pack.a_half * pack.w * pack.u.t() * h1.h1;
        res.phi = mm_phase(pack.a, b, arma::cx_vec(c_mat.diag()), res.phi, mm_tol, mm_max_iter);

        pack.e = mse_matrix(pack.u, h1, res.phi, pack.a_half, sigma2);
        res.h_trace.push_back(h_value());
        res.iterations = s;
        if (std::abs(res.h_trace[static_cast<std::size_t>(s)] -
                     res.h_trace[static_cast<std::size_t>(s) - 1]) <= tol)
            break;
    }
    return res;
}

/// Phase-only rate objective C(Phi) = log2 det(I + (1/sigma2) H1 Phi A Phi^H H1^H).
inline double rate_C(const PhaseVector& phi, const RisBsChannel& h1, const arma::cx_mat& a,
                     double sigma2) {
    const arma::cx_mat hp = h1.h1 * arma::diagmat(phi.phi);
    return log2det_eye_plus(hermitize(hp * a * hp.t() / sigma2));
}

} // namespace risopt

#endif // RISOPT_PHASE_OPT_HPP
