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
// Experiment orchestration: flat key-value config files, sweep execution
// over (mode, P_max) pairs on a worker pool, and plot-ready CSV output.
// Outputs are a pure function of (config, master_seed): channel statistics
// are drawn once per experiment from fixed substreams, every run gets a
// fixed Monte Carlo substream, and result rows are written in sweep order
// regardless of worker scheduling.

#ifndef RISOPT_EXPERIMENT_HPP
#define RISOPT_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "risopt/ao.hpp"
#include "risopt/montecarlo.hpp"

namespace risopt {

/// Malformed or inconsistent experiment configuration.
struct SpecError : std::runtime_error {
    explicit SpecError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Output location problems (missing/unwritable directory).
struct OutputError : std::runtime_error {
    explicit OutputError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class RunMode { gee, se, fixed_phi_baseline };

inline const char* to_string(RunMode m) {
    switch (m) {
        case RunMode::gee: return "gee";
        case RunMode::se: return "se";
        default: return "fixed_phi_baseline";
    }
}

/// Fully resolved experiment description, in human units (powers in dBm,
/// bandwidth in MHz); watt conversion happens in to_system_config.
struct ExperimentSpec {
    std::string scenario;
    int k_users = 0;
    std::vector<int> n_ut_antennas;
    int m_bs_antennas = 0;
    int n_ris_elements = 0;
    double bandwidth_mhz = 10.0;
    double sigma2_dbm = -96.0;
    std::vector<double> rho;          ///< amplifier efficiency per UT, xi = 1/rho
    std::vector<double> p_c_dbm;      ///< per-UT circuit power
    double p_bs_dbm = 39.0;
    double p_s_dbm = 10.0;
    double pathloss_db = -120.0;      ///< -inf gives an exactly zero channel
    double channel_corr = 0.5;
    std::vector<double> sweep_p_max_dbm;
    std::vector<RunMode> modes{RunMode::gee};
    int mc_samples = 2000;            ///< 0 disables the Monte Carlo cross-check
    std::uint64_t master_seed = 1;
    std::string output_dir;
    double tol_outer = 1e-4;
    int max_outer = 100;
    int phase_refresh_cycles = 3;
    bool deterministic_timing = false;   ///< write 0.000 wall times (reproducible artifacts)

    SystemConfig to_system_config(double p_max_dbm) const {
        SystemConfig c;
        c.num_uts = k_users;
        c.ut_antennas = n_ut_antennas;
        c.bs_antennas = m_bs_antennas;
        c.ris_elements = n_ris_elements;
        c.bandwidth_hz = bandwidth_mhz * 1e6;
        c.noise_power_w = dbm_to_watts(sigma2_dbm);
        for (double r : rho) c.amp_inefficiency.push_back(1.0 / r);
        for (double p : p_c_dbm) c.circuit_power_w.push_back(dbm_to_watts(p));
        c.bs_static_power_w = dbm_to_watts(p_bs_dbm);
        c.ris_element_power_w = dbm_to_watts(p_s_dbm);
        c.max_power_w.assign(static_cast<std::size_t>(k_users), dbm_to_watts(p_max_dbm));
        return c;
    }

    void validate() const {
        if (scenario.empty()) throw SpecError("scenario must not be empty");
        if (scenario.find(',') != std::string::npos) throw SpecError("scenario must not contain commas");
        if (k_users < 1) throw SpecError("k_users must be >= 1");
        if (n_ut_antennas.size() != static_cast<std::size_t>(k_users))
            throw SpecError("n_ut_antennas must list one value (or K values) per UT");
        for (int n : n_ut_antennas)
            if (n < 1) throw SpecError("n_ut_antennas entries must be >= 1");
        if (m_bs_antennas < 1) throw SpecError("m_bs_antennas must be >= 1");
        if (n_ris_elements < 1) throw SpecError("n_ris_elements must be >= 1");
        if (!(bandwidth_mhz > 0.0)) throw SpecError("bandwidth_mhz must be positive");
        if (rho.size() != static_cast<std::size_t>(k_users)) throw SpecError("rho must have K entries");
        for (double r : rho)
            if (!(r > 0.0)) throw SpecError("rho entries must be positive");
        if (p_c_dbm.size() != static_cast<std::size_t>(k_users)) throw SpecError("p_c_dbm must have K entries");
        if (!(channel_corr >= 0.0 && channel_corr < 1.0)) throw SpecError("channel_corr must lie in [0, 1)");
        if (sweep_p_max_dbm.empty()) throw SpecError("sweep_p_max_dbm must not be empty");
        for (std::size_t i = 1; i < sweep_p_max_dbm.size(); ++i)
            if (!(sweep_p_max_dbm[i] > sweep_p_max_dbm[i - 1]))
                throw SpecError("sweep_p_max_dbm must be strictly increasing");
        if (modes.empty()) throw SpecError("modes must not be empty");
        if (mc_samples < 0) throw SpecError("mc_samples must be >= 0");
        if (mc_samples == 1) throw SpecError("mc_samples must be 0 or >= 2");
        if (!(tol_outer > 0.0)) throw SpecError("tol_outer must be positive");
        if (max_outer < 1) throw SpecError("max_outer must be >= 1");
        if (phase_refresh_cycles < 0) throw SpecError("phase_refresh_cycles must be >= 0");
        if (output_dir.empty()) throw SpecError("output_dir must not be empty");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

struct SpecEntry {
    std::string value;
    int line = 0;
    bool used = false;
};

struct SpecReader {
    std::map<std::string, SpecEntry> entries;
    std::string path;

    [[noreturn]] void fail(const std::string& key, const std::string& why) const {
        const auto it = entries.find(key);
        const std::string loc = (it != entries.end())
                                    ? path + ":" + std::to_string(it->second.line)
                                    : path;
        throw SpecError(loc + ": key '" + key + "' " + why);
    }

    std::optional<std::string> raw(const std::string& key) {
        auto it = entries.find(key);
        if (it == entries.end()) return std::nullopt;
        it->second.used = true;
        return it->second.value;
    }

    std::string required(const std::string& key) {
        auto v = raw(key);
        if (!v) throw SpecError(path + ": missing required key '" + key + "'");
        return *v;
    }

    double as_double(const std::string& key, const std::string& text) const {
        try {
            std::size_t pos = 0;
            const double v = std::stod(text, &pos);
            if (pos != text.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            fail(key, "has unparsable numeric value '" + text + "'");
        }
    }

    int as_int(const std::string& key, const std::string& text) const {
        try {
            std::size_t pos = 0;
            const long v = std::stol(text, &pos);
            if (pos != text.size()) throw std::invalid_argument("");
            return static_cast<int>(v);
        } catch (const std::exception&) {
            fail(key, "has unparsable integer value '" + text + "'");
        }
    }

    std::uint64_t as_u64(const std::string& key, const std::string& text) const {
        try {
            std::size_t pos = 0;
            const std::uint64_t v = std::stoull(text, &pos);
            if (pos != text.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            fail(key, "has unparsable unsigned integer value '" + text + "'");
        }
    }

    bool as_bool(const std::string& key, const std::string& text) const {
        if (text == "true" || text == "1") return true;
        if (text == "false" || text == "0") return false;
        fail(key, "must be true or false, got '" + text + "'");
    }
};

inline std::string format_double(double v, const char* fmt = "%.12g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

} // namespace detail

/// Parses a flat `key = value` config file ('#' starts a comment). Unknown
/// keys, missing required keys and unparsable values are errors naming the
/// offending line; optional keys fall back to documented defaults.
inline ExperimentSpec parse_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open spec file '" + path + "'");

    detail::SpecReader reader;
    reader.path = path;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = detail::trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw SpecError(path + ":" + std::to_string(lineno) + ": expected 'key = value', got '" +
                            stripped + "'");
        const std::string key = detail::trim(stripped.substr(0, eq));
        const std::string value = detail::trim(stripped.substr(eq + 1));
        if (key.empty())
            throw SpecError(path + ":" + std::to_string(lineno) + ": empty key");
        if (reader.entries.count(key))
            throw SpecError(path + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        reader.entries[key] = {value, lineno, false};
    }

    ExperimentSpec spec;
    spec.scenario = reader.required("scenario");
    spec.k_users = reader.as_int("k_users", reader.required("k_users"));
    if (spec.k_users < 1) reader.fail("k_users", "must be >= 1");
    const auto k = static_cast<std::size_t>(spec.k_users);

    auto int_list = [&](const std::string& key, const std::string& text) {
        std::vector<int> out;
        for (const auto& tok : detail::split_list(text)) out.push_back(reader.as_int(key, tok));
        if (out.size() == 1) out.assign(k, out[0]);
        if (out.size() != k) reader.fail(key, "must list one value or exactly K values");
        return out;
    };
    auto double_list = [&](const std::string& key, const std::string& text) {
        std::vector<double> out;
        for (const auto& tok : detail::split_list(text)) out.push_back(reader.as_double(key, tok));
        if (out.size() == 1) out.assign(k, out[0]);
        if (out.size() != k) reader.fail(key, "must list one value or exactly K values");
        return out;
    };

    spec.n_ut_antennas = int_list("n_ut_antennas", reader.required("n_ut_antennas"));
    spec.m_bs_antennas = reader.as_int("m_bs_antennas", reader.required("m_bs_antennas"));
    spec.n_ris_elements = reader.as_int("n_ris_elements", reader.required("n_ris_elements"));
    for (const auto& tok : detail::split_list(reader.required("sweep_p_max_dbm")))
        spec.sweep_p_max_dbm.push_back(reader.as_double("sweep_p_max_dbm", tok));

    if (auto v = reader.raw("bandwidth_mhz")) spec.bandwidth_mhz = reader.as_double("bandwidth_mhz", *v);
    if (auto v = reader.raw("sigma2_dbm")) spec.sigma2_dbm = reader.as_double("sigma2_dbm", *v);
    spec.rho = reader.raw("rho") ? double_list("rho", *reader.raw("rho"))
                                 : std::vector<double>(k, 0.3);
    spec.p_c_dbm = reader.raw("p_c_dbm") ? double_list("p_c_dbm", *reader.raw("p_c_dbm"))
                                         : std::vector<double>(k, 20.0);
    if (auto v = reader.raw("p_bs_dbm")) spec.p_bs_dbm = reader.as_double("p_bs_dbm", *v);
    if (auto v = reader.raw("p_s_dbm")) spec.p_s_dbm = reader.as_double("p_s_dbm", *v);
    if (auto v = reader.raw("pathloss_db")) spec.pathloss_db = reader.as_double("pathloss_db", *v);
    if (auto v = reader.raw("channel_corr")) spec.channel_corr = reader.as_double("channel_corr", *v);
    if (auto v = reader.raw("mc_samples")) spec.mc_samples = reader.as_int("mc_samples", *v);
    if (auto v = reader.raw("master_seed")) spec.master_seed = reader.as_u64("master_seed", *v);
    if (auto v = reader.raw("tol_outer")) spec.tol_outer = reader.as_double("tol_outer", *v);
    if (auto v = reader.raw("max_outer")) spec.max_outer = reader.as_int("max_outer", *v);
    if (auto v = reader.raw("phase_refresh_cycles"))
        spec.phase_refresh_cycles = reader.as_int("phase_refresh_cycles", *v);
    if (auto v = reader.raw("deterministic_timing"))
        spec.deterministic_timing = reader.as_bool("deterministic_timing", *v);
    spec.output_dir = reader.raw("output_dir").value_or("results/" + spec.scenario);

    if (auto v = reader.raw("modes")) {
        spec.modes.clear();
        for (const auto& tok : detail::split_list(*v)) {
            if (tok == "gee") spec.modes.push_back(RunMode::gee);
            else if (tok == "se") spec.modes.push_back(RunMode::se);
            else if (tok == "fixed_phi_baseline") spec.modes.push_back(RunMode::fixed_phi_baseline);
            else reader.fail("modes", "contains unknown mode '" + tok + "'");
            for (std::size_t i = 0; i + 1 < spec.modes.size(); ++i)
                if (spec.modes[i] == spec.modes.back()) reader.fail("modes", "lists '" + tok + "' twice");
        }
    }

    for (const auto& [key, entry] : reader.entries)
        if (!entry.used)
            throw SpecError(path + ":" + std::to_string(entry.line) + ": unknown key '" + key + "'");

    spec.validate();
    return spec;
}

/// Resolved-configuration echo, including derived watt values and every seed
/// the experiment will consume.
inline nlohmann::ordered_json resolved_json(const ExperimentSpec& spec) {
    nlohmann::ordered_json j;
    j["scenario"] = spec.scenario;
    j["k_users"] = spec.k_users;
    j["n_ut_antennas"] = spec.n_ut_antennas;
    j["m_bs_antennas"] = spec.m_bs_antennas;
    j["n_ris_elements"] = spec.n_ris_elements;
    j["bandwidth_mhz"] = spec.bandwidth_mhz;
    j["sigma2_dbm"] = spec.sigma2_dbm;
    j["rho"] = spec.rho;
    j["p_c_dbm"] = spec.p_c_dbm;
    j["p_bs_dbm"] = spec.p_bs_dbm;
    j["p_s_dbm"] = spec.p_s_dbm;
    j["pathloss_db"] = spec.pathloss_db;
    j["channel_corr"] = spec.channel_corr;
    j["sweep_p_max_dbm"] = spec.sweep_p_max_dbm;
    std::vector<std::string> mode_names;
    for (RunMode m : spec.modes) mode_names.emplace_back(to_string(m));
    j["modes"] = mode_names;
    j["mc_samples"] = spec.mc_samples;
    j["master_seed"] = spec.master_seed;
    j["output_dir"] = spec.output_dir;
    j["tol_outer"] = spec.tol_outer;
    j["max_outer"] = spec.max_outer;
    j["phase_refresh_cycles"] = spec.phase_refresh_cycles;
    j["deterministic_timing"] = spec.deterministic_timing;

    nlohmann::ordered_json derived;
    derived["bandwidth_hz"] = spec.bandwidth_mhz * 1e6;
    derived["sigma2_w"] = dbm_to_watts(spec.sigma2_dbm);
    std::vector<double> xi, p_c_w;
    for (double r : spec.rho) xi.push_back(1.0 / r);
    for (double p : spec.p_c_dbm) p_c_w.push_back(dbm_to_watts(p));
    derived["xi"] = xi;
    derived["p_c_w"] = p_c_w;
    derived["p_bs_w"] = dbm_to_watts(spec.p_bs_dbm);
    derived["p_s_w"] = dbm_to_watts(spec.p_s_dbm);
    std::vector<double> sweep_w;
    for (double p : spec.sweep_p_max_dbm) sweep_w.push_back(dbm_to_watts(p));
    derived["sweep_p_max_w"] = sweep_w;
    derived["pathloss_linear"] = db_to_linear(spec.pathloss_db);
    j["derived"] = derived;

    nlohmann::ordered_json seeds;
    seeds["stats_stream"] = derive_seed(spec.master_seed, 1);
    seeds["h1_stream"] = derive_seed(spec.master_seed, 2);
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    std::size_t run_index = 0;
    for (RunMode m : spec.modes) {
        for (double p : spec.sweep_p_max_dbm) {
            nlohmann::ordered_json r;
            r["run_index"] = run_index;
            r["mode"] = to_string(m);
            r["p_max_dbm"] = p;
            r["mc_seed"] = derive_seed(spec.master_seed, 1000 + run_index);
            runs.push_back(r);
            ++run_index;
        }
    }
    seeds["runs"] = runs;
    j["seeds"] = seeds;
    return j;
}

namespace detail {

struct RunResult {
    RunMode mode = RunMode::gee;
    double p_max_dbm = 0.0;
    Solution solution;
    std::optional<McEstimate> mc;
    double wall_time_s = 0.0;
};

inline RunResult execute_run(const ExperimentSpec& spec, const RisBsChannel& h1,
                             const std::vector<UtChannelStats>& stats, RunMode mode,
                             double p_max_dbm, std::size_t run_index) {
    const auto t0 = std::chrono::steady_clock::now();
    const SystemConfig config = spec.to_system_config(p_max_dbm);

    OptimizerOptions options;
    options.mode = (mode == RunMode::se) ? Objective::se : Objective::gee;
    options.tol_outer = spec.tol_outer;
    options.max_outer = spec.max_outer;
    options.phase_refresh_cycles = (mode == RunMode::fixed_phi_baseline) ? 0 : spec.phase_refresh_cycles;

    RunResult out;
    out.mode = mode;
    out.p_max_dbm = p_max_dbm;
    out.solution = maximize(config, h1, stats, options);
    if (spec.mc_samples > 0)
        out.mc = ergodic_se(h1, out.solution.phi, out.solution.q, stats, config.noise_power_w,
                            spec.mc_samples, derive_seed(spec.master_seed, 1000 + run_index));
    out.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

} // namespace detail

/// Runs the full experiment: synthesizes the scenario channel statistics,
/// dispatches every (mode, P_max) pair to a worker pool, and writes
/// results.csv, one trace CSV per run, and spec_resolved.json into
/// output_dir. Throws SpecError/OutputError/std::runtime_error; the CLI maps
/// those to exit codes 2 and 3.
inline void run(const ExperimentSpec& spec, int threads = 0) {
    spec.validate();

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(spec.output_dir, ec);
    if (ec) throw OutputError("cannot create output directory '" + spec.output_dir + "': " + ec.message());
    {
        std::ofstream probe(fs::path(spec.output_dir) / "results.csv");
        if (!probe) throw OutputError("output directory '" + spec.output_dir + "' is not writable");
    }

    Rng stats_rng(spec.master_seed, 1);
    Rng h1_rng(spec.master_seed, 2);
    const SystemConfig base_config = spec.to_system_config(spec.sweep_p_max_dbm.front());
    base_config.validate();
    const std::vector<UtChannelStats> stats =
        synthesize_stats(base_config, spec.channel_corr, spec.pathloss_db, stats_rng);
    const RisBsChannel h1 = sample_h1(base_config, h1_rng);

    struct RunSpec {
        RunMode mode;
        double p_max_dbm;
    };
    std::vector<RunSpec> run_specs;
    for (RunMode m : spec.modes)
        for (double p : spec.sweep_p_max_dbm) run_specs.push_back({m, p});

    std::vector<detail::RunResult> results(run_specs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        while (!failed.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= run_specs.size()) break;
            try {
                results[i] = detail::execute_run(spec, h1, stats, run_specs[i].mode,
                                                 run_specs[i].p_max_dbm, i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
                break;
            }
        }
    };

    unsigned n_threads = threads > 0 ? static_cast<unsigned>(threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(run_specs.size()));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::ofstream results_csv(fs::path(spec.output_dir) / "results.csv");
    results_csv << "scenario,mode,p_max_dbm,gee_bits_per_joule,se_bits_s_hz,"
                   "mc_se_mean,mc_se_stderr,outer_iters,eta_final,wall_time_s\n";
    for (const auto& r : results) {
        const auto& sol = r.solution;
        const double eta_final = sol.trace.empty() ? 0.0 : sol.trace.back().eta;
        results_csv << spec.scenario << ',' << to_string(r.mode) << ','
                    << detail::format_double(r.p_max_dbm, "%g") << ','
                    << detail::format_double(sol.gee) << ',' << detail::format_double(sol.se) << ',';
        if (r.mc) {
            results_csv << detail::format_double(r.mc->mean) << ','
                        << detail::format_double(r.mc->std_error);
        } else {
            results_csv << ',';
        }
        results_csv << ',' << sol.outer_iterations << ',' << detail::format_double(eta_final) << ','
                    << detail::format_double(spec.deterministic_timing ? 0.0 : r.wall_time_s, "%.3f")
                    << '\n';
    }
    results_csv.close();
    if (!results_csv) throw OutputError("failed writing results.csv");

    for (const auto& r : results) {
        const std::string name = std::string("trace_") + to_string(r.mode) + "_" +
                                 detail::format_double(r.p_max_dbm, "%g") + ".csv";
        std::ofstream trace_csv(fs::path(spec.output_dir) / name);
        trace_csv << "iteration,gee_bits_per_joule,se_bits_s_hz,eta_bits_per_joule\n";
        for (const auto& rec : r.solution.trace)
            trace_csv << rec.iteration << ',' << detail::format_double(rec.gee) << ','
                      << detail::format_double(rec.se) << ',' << detail::format_double(rec.eta)
                      << '\n';
        trace_csv.close();
        if (!trace_csv) throw OutputError("failed writing " + name);
    }

    std::ofstream json_out(fs::path(spec.output_dir) / "spec_resolved.json");
    json_out << resolved_json(spec).dump(2) << '\n';
    json_out.close();
    if (!json_out) throw OutputError("failed writing spec_resolved.json");
}

} // namespace risopt

#endif // RISOPT_EXPERIMENT_HPP
