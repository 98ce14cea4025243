// Copyright 2026 The Passage Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Umbrella header: the whole library.

#include "passage/analysis.hpp"
#include "passage/common.hpp"
#include "passage/evolution.hpp"
#include "passage/hamiltonian.hpp"
#include "passage/io.hpp"
#include "passage/optimize.hpp"
#include "passage/oracle.hpp"
#include "passage/pulses.hpp"
#include "passage/scenario.hpp"
#include "passage/statespace.hpp"
#include "passage/sweep.hpp"
#include "passage/trajectory.hpp"
