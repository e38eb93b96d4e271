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
// Monte Carlo estimate of the ergodic spectral efficiency. This is the
// independent oracle the deterministic-equivalent engine is validated
// against; it shares only the channel sampler with the rest of the library.

#ifndef RISOPT_MONTECARLO_HPP
#define RISOPT_MONTECARLO_HPP

#include <armadillo>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "risopt/channel.hpp"
#include "risopt/de.hpp"
#include "risopt/linalg.hpp"

namespace risopt {

struct McEstimate {
    double mean = 0.0;        ///< bits/s/Hz
    double std_error = 0.0;   ///< sample std dev / sqrt(n)
    int n_samples = 0;
};

namespace detail {

/// Welford accumulator, mergeable so a fixed block partition yields the same
/// result no matter which order blocks are computed in.
struct Welford {
    long long n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const Welford& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double d = o.mean - mean;
        const long long total = n + o.n;
        mean += d * static_cast<double>(o.n) / static_cast<double>(total);
        m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / static_cast<double>(total);
        n = total;
    }
};

} // namespace detail

/// Ergodic SE estimate: mean over n_samples draws of
/// log2 det(I + (1/sigma2) sum_k H1 Phi H2_k Q_k H2_k^H Phi^H H1^H),
/// each draw evaluated via Cholesky of I + (1/sigma2) G G^H with G the
/// stacked effective channel. Draw i uses the substream derive_seed(seed, i),
/// and draws are merged blockwise in fixed order, so the estimate depends
/// only on (inputs, seed) — not on scheduling.
inline McEstimate ergodic_se(const RisBsChannel& h1, const PhaseVector& phi,
                             const std::vector<arma::cx_mat>& q,
                             const std::vector<UtChannelStats>& stats, double sigma2,
                             int n_samples, std::uint64_t seed) {
    if (n_samples < 2) throw std::invalid_argument("ergodic_se: need at least 2 samples");
    if (q.size() != stats.size()) throw std::invalid_argument("ergodic_se: Q/stats size mismatch");
    const std::size_t num_uts = stats.size();

    std::vector<arma::cx_mat> q_half(num_uts);
    for (std::size_t k = 0; k < num_uts; ++k) {
        arma::vec eval;
        if (!arma::eig_sym(eval, hermitize(q[k])))
            throw std::runtime_error("ergodic_se: covariance eigendecomposition failed");
        if (eval.min() < -1e-8)
            throw std::invalid_argument("ergodic_se: covariance matrix is not PSD");
        q_half[k] = psd_sqrt(q[k]);
    }

    const arma::cx_mat h1_phased = h1.h1 * arma::diagmat(phi.phi);
    const arma::uword m_bs = h1.h1.n_rows;
    arma::uword n_total = 0;
    for (std::size_t k = 0; k < num_uts; ++k) n_total += q_half[k].n_cols;

    constexpr int kBlock = 512;
    detail::Welford acc;
    for (int start = 0; start < n_samples; start += kBlock) {
        detail::Welford block;
        const int stop = std::min(n_samples, start + kBlock);
        for (int i = start; i < stop; ++i) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
            arma::cx_mat g(m_bs, n_total);
            arma::uword col = 0;
            for (std::size_t k = 0; k < num_uts; ++k) {
                const arma::cx_mat h2 = sample_ut_channel(stats[k], rng);
                g.cols(col, col + q_half[k].n_cols - 1) = h1_phased * h2 * q_half[k];
                col += q_half[k].n_cols;
            }
            block.add(log2det_eye_plus(hermitize(g * g.t() / sigma2)));
        }
        acc.merge(block);
    }

    McEstimate est;
    est.mean = acc.mean;
    est.n_samples = n_samples;
    est.std_error = std::sqrt(acc.m2 / static_cast<double>(acc.n - 1) / static_cast<double>(acc.n));
    return est;
}

} // namespace risopt

#endif // RISOPT_MONTECARLO_HPP
