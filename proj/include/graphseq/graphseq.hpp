// Copyright 2026 The graphseq Authors.
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

#include "graphseq/common.hpp"
#include "graphseq/encoder.hpp"
#include "graphseq/generators.hpp"
#include "graphseq/grammar.hpp"
#include "graphseq/graph.hpp"
#include "graphseq/metrics.hpp"
#include "graphseq/node_link.hpp"
#include "graphseq/ordering.hpp"
#include "graphseq/parser.hpp"
#include "graphseq/rules.hpp"
#include "graphseq/sampler.hpp"
#include "graphseq/schema.hpp"
#include "graphseq/validator.hpp"
#include "graphseq/vocab.hpp"
