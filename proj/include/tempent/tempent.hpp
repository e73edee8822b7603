// Copyright 2026 The tempent Authors.
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

#include "tempent/corpus.hpp"
#include "tempent/embedding.hpp"
#include "tempent/error.hpp"
#include "tempent/eval.hpp"
#include "tempent/experiment.hpp"
#include "tempent/modelstore.hpp"
#include "tempent/preprocess.hpp"
#include "tempent/relatedness.hpp"
#include "tempent/sampling.hpp"
#include "tempent/stats.hpp"
#include "tempent/timeslice.hpp"
#include "tempent/vocabulary.hpp"
