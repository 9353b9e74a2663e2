/* Copyright 2026 The glas-eval Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef GLAS_GLAS_HPP_
#define GLAS_GLAS_HPP_

#include "glas/baseline.hpp"
#include "glas/distance.hpp"
#include "glas/errors.hpp"
#include "glas/io.hpp"
#include "glas/label_map.hpp"
#include "glas/matching.hpp"
#include "glas/metrics.hpp"
#include "glas/ranking.hpp"

#endif  // GLAS_GLAS_HPP_
