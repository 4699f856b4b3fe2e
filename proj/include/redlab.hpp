// Copyright 2026 The Redaction Lab Authors. All Rights Reserved.
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

#ifndef REDLAB_REDLAB_HPP
#define REDLAB_REDLAB_HPP

#include "redlab/checkpoint.hpp"
#include "redlab/csv.hpp"
#include "redlab/distributions.hpp"
#include "redlab/divergence.hpp"
#include "redlab/dynamics.hpp"
#include "redlab/evaluation.hpp"
#include "redlab/exact_solver.hpp"
#include "redlab/gan.hpp"
#include "redlab/gaussian_demo.hpp"
#include "redlab/hash.hpp"
#include "redlab/mlp.hpp"
#include "redlab/redaction.hpp"
#include "redlab/toy.hpp"

#endif  // REDLAB_REDLAB_HPP
