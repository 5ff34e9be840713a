// Copyright 2026 The Profiled Auctions Authors.
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

// Umbrella header. serialization.hpp (nlohmann/json) is not included here.

#include "profiled/bounds.hpp"
#include "profiled/dist_spec.hpp"
#include "profiled/distribution.hpp"
#include "profiled/errors.hpp"
#include "profiled/mechanisms.hpp"
#include "profiled/quadrature.hpp"
#include "profiled/quantities.hpp"
#include "profiled/rng.hpp"
#include "profiled/simulation.hpp"
