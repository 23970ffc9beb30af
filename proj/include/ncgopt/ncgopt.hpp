// Copyright 2026 The ncgopt Authors. All Rights Reserved.
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

#include "ncgopt/accel.hpp"
#include "ncgopt/certificate.hpp"
#include "ncgopt/core/finite_difference.hpp"
#include "ncgopt/core/problem.hpp"
#include "ncgopt/core/problems.hpp"
#include "ncgopt/core/registry.hpp"
#include "ncgopt/core/rng.hpp"
#include "ncgopt/core/types.hpp"
#include "ncgopt/eigensolver/dense.hpp"
#include "ncgopt/eigensolver/lanczos.hpp"
#include "ncgopt/solvers.hpp"
#include "ncgopt/steps.hpp"
