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

#ifndef RISOPT_CHANNEL_HPP
#define RISOPT_CHANNEL_HPP

#include <armadillo>
#include <stdexcept>
#include <vector>

#include "risopt/config.hpp"
#include "risopt/rng.hpp"

namespace risopt {

/// Statistical CSI of one UT-to-RIS link: unitary eigenbases at both ends
/// plus the eigenmode coupling matrix (average energy coupled between each
/// receive/transmit eigenvector pair, linear power units, path loss folded
/// in).
struct UtChannelStats {
    arma::cx_mat u2;   ///< ris_elements x ris_elements, receive eigenbasis
    arma::cx_mat v2;   ///< n_k x n_k, transmit eigenbasis
    arma::mat omega;   ///< ris_elements x n_k, nonnegative coupling energies
};

/// Instantaneous RIS-to-BS channel (known exactly at the optimizer).
struct RisBsChannel {
    arma::cx_mat h1;   ///< bs_antennas x ris_elements
};

/// One instantaneous draw of all UT-to-RIS channels.
struct ChannelRealization {
    std::vector<arma::cx_mat> h2;   ///< K matrices, ris_elements x n_k
};

/// Haar-distributed random unitary matrix: QR of a complex Gaussian matrix
/// with the R-diagonal phase correction.
inline arma::cx_mat make_random_unitary(int dim, Rng& rng) {
    if (dim < 1) throw std::invalid_argument("make_random_unitary: dim must be >= 1");
    const auto n = static_cast<arma::uword>(dim);
    arma::cx_mat q, r;
    if (!arma::qr(q, r, cgaussian_matrix(rng, n, n)))
        throw std::runtime_error("make_random_unitary: QR failed");
    arma::cx_vec phase(n);
    for (arma::uword i = 0; i < n; ++i) {
        const std::complex<double> d = r(i, i);
        phase(i) = (std::abs(d) > 0.0) ? d / std::abs(d) : 1.0;
    }
    return q * arma::diagmat(phase);
}

/// Synthetic statistical CSI for all UTs: Haar eigenbases and an
/// exponential-decay coupling profile [omega]_{n,m} ~ corr^(|n-m| mod
/// min(N_R, N_k)) with multiplicative jitter in [0.5, 1.5], rescaled so the
/// total coupled energy equals ris_elements * n_k * 10^(pathloss_db/10).
inline std::vector<UtChannelStats> synthesize_stats(const SystemConfig& config, double corr,
                                                    double pathloss_db, Rng& rng) {
    if (!(corr >= 0.0 && corr < 1.0))
        throw std::invalid_argument("synthesize_stats: corr must lie in [0, 1)");
    std::vector<UtChannelStats> stats;
    stats.reserve(static_cast<std::size_t>(config.num_uts));
    const auto nr = static_cast<arma::uword>(config.ris_elements);
    for (int k = 0; k < config.num_uts; ++k) {
        const auto nk = static_cast<arma::uword>(config.ut_antennas[static_cast<std::size_t>(k)]);
        UtChannelStats s;
        s.u2 = make_random_unitary(static_cast<int>(nr), rng);
        s.v2 = make_random_unitary(static_cast<int>(nk), rng);
        s.omega.set_size(nr, nk);
        const arma::uword wrap = std::min(nr, nk);
        for (arma::uword m = 0; m < nk; ++m) {
            for (arma::uword n = 0; n < nr; ++n) {
                const arma::uword d = (n > m ? n - m : m - n) % wrap;
                const double profile = (d == 0) ? 1.0 : std::pow(corr, static_cast<double>(d));
                s.omega(n, m) = profile * rng.uniform(0.5, 1.5);
            }
        }
        const double target = static_cast<double>(nr) * static_cast<double>(nk) * db_to_linear(pathloss_db);
        const double total = arma::accu(s.omega);
        s.omega *= (total > 0.0) ? target / total : 0.0;
        stats.push_back(std::move(s));
    }
    return stats;
}

/// One UT-to-RIS channel draw: H2 = U2 (G .* sqrt(omega)) V2^H with G i.i.d.
/// CN(0,1), so E|inner|^2 matches omega entry-wise.
inline arma::cx_mat sample_ut_channel(const UtChannelStats& stats, Rng& rng) {
    arma::cx_mat g = cgaussian_matrix(rng, stats.omega.n_rows, stats.omega.n_cols);
    g %= arma::conv_to<arma::cx_mat>::from(arma::sqrt(stats.omega));
    return stats.u2 * g * stats.v2.t();
}

/// RIS-to-BS channel draw with i.i.d. CN(0,1) entries; its large-scale gain
/// lives entirely in the coupling matrices.
inline RisBsChannel sample_h1(const SystemConfig& config, Rng& rng) {
    return {cgaussian_matrix(rng, static_cast<arma::uword>(config.bs_antennas),
                             static_cast<arma::uword>(config.ris_elements))};
}

} // namespace risopt

#endif // RISOPT_CHANNEL_HPP
