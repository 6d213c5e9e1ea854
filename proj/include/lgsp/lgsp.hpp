// Copyright 2026 The lgsp Authors
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

// Umbrella header for the lgsp library.

#pragma once

#include "lgsp/core.hpp"
#include "lgsp/basis.hpp"
#include "lgsp/integrals.hpp"
#include "lgsp/filter.hpp"
#include "lgsp/jumps.hpp"
#include "lgsp/ode.hpp"
#include "lgsp/lindblad.hpp"
#include "lgsp/quasifree.hpp"
#include "lgsp/trajectory.hpp"
#include "lgsp/experiment.hpp"
