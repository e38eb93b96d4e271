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

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "risopt/experiment.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

} // namespace

int main(int argc, char** argv) {
    // keep BLAS single-threaded: run-level parallelism lives in the worker
    // pool, and output bytes must not depend on BLAS scheduling
    setenv("OPENBLAS_NUM_THREADS", "1", 0);
    setenv("OMP_NUM_THREADS", "1", 0);

    CLI::App app{"risopt — GEE/SE optimization experiments for RIS-assisted MIMO uplink"};
    app.require_subcommand(1);

    std::string spec_path;
    std::optional<std::uint64_t> seed_override;
    int threads = 0;

    auto* run_cmd = app.add_subcommand("run", "run the experiment described by a spec file");
    run_cmd->add_option("spec", spec_path, "path to the spec file")->required();
    run_cmd->add_option("--seed", seed_override, "override master_seed from the spec");
    run_cmd->add_option("--threads", threads, "worker thread cap (0 = auto)");

    auto* validate_cmd = app.add_subcommand("validate", "parse a spec file and echo the resolved configuration");
    validate_cmd->add_option("spec", spec_path, "path to the spec file")->required();
    validate_cmd->add_option("--seed", seed_override, "override master_seed from the spec");

    CLI11_PARSE(app, argc, argv);

    try {
        risopt::ExperimentSpec spec = risopt::parse_spec(spec_path);
        if (seed_override) spec.master_seed = *seed_override;
        if (validate_cmd->parsed()) {
            std::cout << risopt::resolved_json(spec).dump(2) << std::endl;
            return 0;
        }
        risopt::run(spec, threads);
        std::cout << "results written to " << spec.output_dir << std::endl;
        return 0;
    } catch (const risopt::SpecError& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return kExitConfigError;
    } catch (const risopt::OutputError& e) {
        std::cerr << "output error: " << e.what() << std::endl;
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << std::endl;
        return kExitNumericalError;
    }
}
