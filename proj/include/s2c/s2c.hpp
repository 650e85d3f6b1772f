// Copyright 2026 The s2c-iae Authors.
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

// Umbrella header.

#pragma once

#include "s2c/artifact.hpp"
#include "s2c/calibration.hpp"
#include "s2c/constraints.hpp"
#include "s2c/corpus.hpp"
#include "s2c/embedding.hpp"
#include "s2c/error.hpp"
#include "s2c/evaluation.hpp"
#include "s2c/generator.hpp"
#include "s2c/golden.hpp"
#include "s2c/harness.hpp"
#include "s2c/memory.hpp"
#include "s2c/mock_generator.hpp"
#include "s2c/ontology.hpp"
#include "s2c/pipeline.hpp"
#include "s2c/remote.hpp"
#include "s2c/scheduler.hpp"
#include "s2c/sequence.hpp"
#include "s2c/synthetic.hpp"
#include "s2c/text.hpp"
#include "s2c/types.hpp"
#include "s2c/wire.hpp"
