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

#ifndef RISOPT_RNG_HPP
#define RISOPT_RNG_HPP

#include <armadillo>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace risopt {

namespace detail {

// SplitMix64 mixing step (Steele, Lea, Flood 2014).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Derives a well-mixed substream seed from a master seed and a stream index.
/// The mapping is fixed; identical (master, stream) pairs always yield the
/// same seed, which is the whole reproducibility contract of the artifact.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master;
    (void)detail::splitmix64(s);
    s ^= stream * 0xD1B54A32D192ED03ULL;
    std::uint64_t out = detail::splitmix64(s);
    return out ^ detail::splitmix64(s);
}

/// Deterministic random stream. Gaussian variates are produced by an
/// explicit Box-Muller transform instead of std::normal_distribution, whose
/// output sequence is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    Rng(std::uint64_t master, std::uint64_t stream) : gen_(derive_seed(master, stream)) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard real Gaussian N(0, 1).
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(1.0 - uniform()));
        const double t = 2.0 * arma::datum::pi * uniform();
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    /// Standard circularly-symmetric complex Gaussian CN(0, 1), E|z|^2 = 1.
    std::complex<double> cgaussian() {
        const double r = std::sqrt(-std::log(1.0 - uniform()));
        const double t = 2.0 * arma::datum::pi * uniform();
        return {r * std::cos(t), r * std::sin(t)};
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Matrix of i.i.d. CN(0,1) entries, filled in column-major order so the
/// draw sequence is part of the determinism contract.
inline arma::cx_mat cgaussian_matrix(Rng& rng, arma::uword rows, arma::uword cols) {
    arma::cx_mat m(rows, cols);
    for (arma::uword j = 0; j < cols; ++j)
        for (arma::uword i = 0; i < rows; ++i)
            m(i, j) = rng.cgaussian();
    return m;
}

} // namespace risopt

#endif // RISOPT_RNG_HPP
