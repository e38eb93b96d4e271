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

#ifndef RISOPT_RISOPT_HPP
#define RISOPT_RISOPT_HPP

#include "risopt/ao.hpp"
#include "risopt/channel.hpp"
#include "risopt/config.hpp"
#include "risopt/de.hpp"
#include "risopt/experiment.hpp"
#include "risopt/linalg.hpp"
#include "risopt/montecarlo.hpp"
#include "risopt/phase_opt.hpp"
#include "risopt/power_alloc.hpp"
#include "risopt/rng.hpp"

#endif // RISOPT_RISOPT_HPP
