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

#ifndef RISOPT_CONFIG_HPP
#define RISOPT_CONFIG_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace risopt {

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// System dimensions and power model. All powers are stored in watts; dBm
/// conversion happens at the CLI/config boundary only.
struct SystemConfig {
    int num_uts = 0;                       ///< number of user terminals
    std::vector<int> ut_antennas;          ///< per-UT transmit antenna count
    int bs_antennas = 0;                   ///< receive antennas at the BS
    int ris_elements = 0;                  ///< reflecting elements at the RIS
    double bandwidth_hz = 0.0;             ///< system bandwidth
    double noise_power_w = 0.0;            ///< thermal noise power at the BS
    std::vector<double> amp_inefficiency;  ///< per-UT amplifier inefficiency (1/efficiency), >= 0
    std::vector<double> circuit_power_w;   ///< per-UT static circuit power
    double bs_static_power_w = 0.0;        ///< static hardware power at the BS
    double ris_element_power_w = 0.0;      ///< static power per RIS phase shifter
    std::vector<double> max_power_w;       ///< per-UT transmit power budget

    int total_ut_antennas() const {
        int n = 0;
        for (int nk : ut_antennas) n += nk;
        return n;
    }

    /// Static (allocation-independent) part of the consumed power.
    double static_power_w() const {
        double p = bs_static_power_w + static_cast<double>(ris_elements) * ris_element_power_w;
        for (double pc : circuit_power_w) p += pc;
        return p;
    }

    void validate() const {
        auto fail = [](const std::string& msg) { throw std::invalid_argument("SystemConfig: " + msg); };
        if (num_uts < 1) fail("need at least one UT");
        if (bs_antennas < 1) fail("need at least one BS antenna");
        if (ris_elements < 1) fail("need at least one RIS element");
        if (!(bandwidth_hz > 0.0)) fail("bandwidth must be positive");
        if (!(noise_power_w > 0.0)) fail("noise power must be positive");
        const auto k = static_cast<std::size_t>(num_uts);
        if (ut_antennas.size() != k) fail("ut_antennas length must equal num_uts");
        if (amp_inefficiency.size() != k) fail("amp_inefficiency length must equal num_uts");
        if (circuit_power_w.size() != k) fail("circuit_power_w length must equal num_uts");
        if (max_power_w.size() != k) fail("max_power_w length must equal num_uts");
        for (int nk : ut_antennas)
            if (nk < 1) fail("each UT needs at least one antenna");
        for (double x : amp_inefficiency)
            if (!(x >= 0.0)) fail("amplifier inefficiency must be >= 0");
        for (double p : circuit_power_w)
            if (!(p >= 0.0)) fail("circuit power must be >= 0");
        for (double p : max_power_w)
            if (!(p >= 0.0)) fail("power budget must be >= 0");
        if (!(bs_static_power_w >= 0.0)) fail("BS static power must be >= 0");
        if (!(ris_element_power_w >= 0.0)) fail("RIS element power must be >= 0");
    }
};

} // namespace risopt

#endif // RISOPT_CONFIG_HPP
