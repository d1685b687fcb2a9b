// Copyright 2026 The SeqRank Authors.
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

#ifndef SEQRANK_SEQRANK_HPP_
#define SEQRANK_SEQRANK_HPP_

#include "seqrank/baselines.hpp"
#include "seqrank/checkpoint.hpp"
#include "seqrank/config.hpp"
#include "seqrank/dataio.hpp"
#include "seqrank/error.hpp"
#include "seqrank/evaluator.hpp"
#include "seqrank/gradcheck.hpp"
#include "seqrank/model.hpp"
#include "seqrank/numkit.hpp"
#include "seqrank/synth.hpp"
#include "seqrank/trainer.hpp"

#endif  // SEQRANK_SEQRANK_HPP_
