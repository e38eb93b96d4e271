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
// Deterministic equivalent (DE) of the ergodic uplink sum rate. The ergodic
// log-det expectation is replaced by a closed form in two families of
// auxiliary variables (gamma, psi) obtained from a coupled fixed point; the
// fixed point is unique and the sweep below converges to it.

#ifndef RISOPT_DE_HPP
#define RISOPT_DE_HPP

#include <armadillo>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "risopt/channel.hpp"
#include "risopt/linalg.hpp"

namespace risopt {

/// Diagonal per-UT transmit power allocation (eigenvalues of the transmit
/// covariance matrices).
struct PowerAllocation {
    std::vector<arma::vec> lambda;   ///< K vectors, length n_k, entries >= 0

    double total() const {
        double p = 0.0;
        for (const auto& l : lambda) p += arma::accu(l);
        return p;
    }

    double sup_norm() const {
        double m = 0.0;
        for (const auto& l : lambda)
            if (!l.empty()) m = std::max(m, l.max());
        return m;
    }

    static PowerAllocation zeros(const SystemConfig& config) {
        PowerAllocation a;
        for (int nk : config.ut_antennas) a.lambda.emplace_back(arma::zeros<arma::vec>(static_cast<arma::uword>(nk)));
        return a;
    }

    /// Budget split equally over each UT's antennas.
    static PowerAllocation uniform_full_power(const SystemConfig& config) {
        PowerAllocation a;
        for (int k = 0; k < config.num_uts; ++k) {
            const auto nk = static_cast<arma::uword>(config.ut_antennas[static_cast<std::size_t>(k)]);
            const double per = config.max_power_w[static_cast<std::size_t>(k)] / static_cast<double>(nk);
            a.lambda.emplace_back(per * arma::ones<arma::vec>(nk));
        }
        return a;
    }
};

/// Unit-modulus RIS phase shift vector, Phi = diag(phi).
struct PhaseVector {
    arma::cx_vec phi;

    static PhaseVector all_ones(int n) {
        return {arma::ones<arma::cx_vec>(static_cast<arma::uword>(n))};
    }

    bool is_unit_modulus(double tol = 1e-10) const {
        for (const auto& p : phi)
            if (std::abs(std::abs(p) - 1.0) >= tol) return false;
        return true;
    }
};

/// Converged DE auxiliaries. stream_gain holds the diagonals of the per-UT
/// coupling-gain matrices diag(omega^T gamma); bs_cov is the M x M
/// deterministic equivalent of the (noise-normalized) received covariance.
struct DeState {
    std::vector<arma::vec> gamma;        ///< K vectors, length ris_elements
    std::vector<arma::vec> psi;          ///< K vectors, length n_k
    std::vector<arma::vec> stream_gain;  ///< K vectors, length n_k
    arma::cx_mat bs_cov;                 ///< Hermitian PSD, bs_antennas square
    bool converged = false;
    int iterations = 0;
};

/// Solves the coupled DE fixed point for fixed phases and power allocation.
///
/// Per sweep, with effective bases U_G[k] = H1 diag(phi) U2[k]:
///   gamma[k](m) = (1/sigma2) * u_{G_k,m}^H (I + bs_cov)^{-1} u_{G_k,m}
///   psi[k](n)   = lambda[k](n) / (1 + stream_gain[k](n) * lambda[k](n))
///   bs_cov      = sum_k (1/sigma2) U_G[k] diag(omega[k] psi[k]) U_G[k]^H
/// All UTs are updated jointly per sweep; the coupling through bs_cov is
/// global. Stops when the scaled sup-norm change max |dx|/(1+|x|) over all
/// gamma and psi entries is <= tol; gamma scales like 1/sigma2, so an
/// unscaled test would sit below double precision. A 0.5 damping factor is
/// engaged only after the residual fails to shrink twice in a row.
inline DeState de_fixed_point(const RisBsChannel& h1, const PhaseVector& phi,
                              const std::vector<UtChannelStats>& stats,
                              const PowerAllocation& alloc, double sigma2,
                              double tol = 1e-8, int max_iter = 500) {
    if (!(tol > 0.0)) throw std::invalid_argument("de_fixed_point: tol must be positive");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("de_fixed_point: sigma2 must be positive");
    const std::size_t num_uts = stats.size();
    if (alloc.lambda.size() != num_uts)
        throw std::invalid_argument("de_fixed_point: allocation/stats size mismatch");

    const arma::uword m_bs = h1.h1.n_rows;
    const arma::cx_mat h1_phased = h1.h1 * arma::diagmat(phi.phi);
    std::vector<arma::cx_mat> u_g(num_uts);
    for (std::size_t k = 0; k < num_uts; ++k) u_g[k] = h1_phased * stats[k].u2;

    DeState st;
    st.gamma.resize(num_uts);
    st.psi.resize(num_uts);
    st.stream_gain.resize(num_uts);
    for (std::size_t k = 0; k < num_uts; ++k) {
        st.gamma[k] = arma::zeros<arma::vec>(stats[k].omega.n_rows);
        // psi-update evaluated at unit gain: cheap, scale-aware start inside [0, lambda]
        st.psi[k] = alloc.lambda[k] / (1.0 + alloc.lambda[k]);
        st.stream_gain[k] = arma::zeros<arma::vec>(stats[k].omega.n_cols);
    }

    auto build_bs_cov = [&](const std::vector<arma::vec>& psi) {
        arma::cx_mat cov(m_bs, m_bs, arma::fill::zeros);
        for (std::size_t k = 0; k < num_uts; ++k) {
            const arma::vec w = stats[k].omega * psi[k];
            cov += u_g[k] * arma::diagmat(w / sigma2) * u_g[k].t();
        }
        return hermitize(cov);
    };

    arma::cx_mat bs_cov = build_bs_cov(st.psi);
    double prev_residual = arma::datum::inf;
    int growth_streak = 0;
    bool damped = false;

    for (int it = 1; it <= max_iter; ++it) {
        const arma::cx_mat eye_plus = arma::eye<arma::cx_mat>(m_bs, m_bs) + bs_cov;
        arma::cx_mat inv_eye_plus;
        if (!arma::inv_sympd(inv_eye_plus, eye_plus))
            throw std::runtime_error("de_fixed_point: Hermitian solve failed at iteration " + std::to_string(it));

        double residual = 0.0;
        std::vector<arma::vec> gamma_new(num_uts), psi_new(num_uts), gain_new(num_uts);
        for (std::size_t k = 0; k < num_uts; ++k) {
            const arma::uword nr = u_g[k].n_cols;
            arma::vec g(nr);
            const arma::cx_mat w = inv_eye_plus * u_g[k];
            for (arma::uword m = 0; m < nr; ++m)
                g(m) = std::real(arma::cdot(u_g[k].col(m), w.col(m))) / sigma2;
            gain_new[k] = stats[k].omega.t() * g;
            psi_new[k] = alloc.lambda[k] / (1.0 + gain_new[k] % alloc.lambda[k]);
            gamma_new[k] = std::move(g);
            if (!gamma_new[k].is_finite() || !psi_new[k].is_finite())
                throw std::runtime_error("de_fixed_point: diverged (non-finite auxiliaries) at iteration " +
                                         std::to_string(it));
            residual = std::max(residual,
                                (arma::abs(gamma_new[k] - st.gamma[k]) / (1.0 + arma::abs(gamma_new[k]))).max());
            residual = std::max(residual,
                                (arma::abs(psi_new[k] - st.psi[k]) / (1.0 + arma::abs(psi_new[k]))).max());
        }

        if (residual >= prev_residual * (1.0 - 1e-3)) {
            if (++growth_streak >= 2) damped = true;
        } else {
            growth_streak = 0;
        }
        prev_residual = residual;

        if (damped) {
            for (std::size_t k = 0; k < num_uts; ++k) {
                st.gamma[k] = 0.5 * st.gamma[k] + 0.5 * gamma_new[k];
                st.psi[k] = 0.5 * st.psi[k] + 0.5 * psi_new[k];
                st.stream_gain[k] = stats[k].omega.t() * st.gamma[k];
            }
        } else {
            st.gamma = std::move(gamma_new);
            st.psi = std::move(psi_new);
            st.stream_gain = std::move(gain_new);
        }
        bs_cov = build_bs_cov(st.psi);
        st.iterations = it;

        if (residual <= tol) {
            st.converged = true;
            break;
        }
    }

    st.bs_cov = bs_cov;
    return st;
}

/// DE of the ergodic sum rate in bits/s/Hz, evaluated in nats and converted:
///   [ sum_k sum_n ln(1 + stream_gain*lambda) + ln det(I + bs_cov)
///     - sum_k gamma^T omega psi ] / ln 2.
/// The correction term must share the same log base as the det terms; only
/// then do the fixed-point equations solved above make the expression
/// stationary in (gamma, psi). The first term uses the diagonal structure
/// directly.
inline double de_rate(const DeState& state, const PowerAllocation& alloc,
                      const std::vector<UtChannelStats>& stats) {
    double nats = 0.0;
    for (std::size_t k = 0; k < stats.size(); ++k) {
        for (arma::uword n = 0; n < alloc.lambda[k].n_elem; ++n)
            nats += std::log1p(state.stream_gain[k](n) * alloc.lambda[k](n));
        nats -= arma::dot(state.gamma[k], stats[k].omega * state.psi[k]);
    }
    nats += log2det_eye_plus(state.bs_cov) * std::numbers::ln2_v<double>;
    return nats / std::numbers::ln2_v<double>;
}

} // namespace risopt

#endif // RISOPT_DE_HPP
