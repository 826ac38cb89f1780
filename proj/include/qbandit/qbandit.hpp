// Copyright 2026 The qbandit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qbandit/circuit.hpp"
#include "qbandit/errors.hpp"
#include "qbandit/experiment.hpp"
#include "qbandit/hypercube.hpp"
#include "qbandit/mlp.hpp"
#include "qbandit/optimize.hpp"
#include "qbandit/optimizers.hpp"
#include "qbandit/pipeline.hpp"
#include "qbandit/plant.hpp"
#include "qbandit/pso.hpp"
#include "qbandit/random.hpp"
#include "qbandit/reward_model.hpp"
#include "qbandit/serialization.hpp"
#include "qbandit/statevector.hpp"
#include "qbandit/training.hpp"
#include "qbandit/vqc.hpp"
