// Copyright 2026 The tilematch Authors
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

#ifndef TILEMATCH_TILEMATCH_HPP
#define TILEMATCH_TILEMATCH_HPP

#include "tilematch/core.hpp"
#include "tilematch/dataset.hpp"
#include "tilematch/descriptor.hpp"
#include "tilematch/evaluation.hpp"
#include "tilematch/fetch.hpp"
#include "tilematch/geometry.hpp"
#include "tilematch/image.hpp"
#include "tilematch/image_io.hpp"
#include "tilematch/matcher.hpp"
#include "tilematch/orb.hpp"
#include "tilematch/random.hpp"
#include "tilematch/serialize.hpp"
#include "tilematch/sift.hpp"
#include "tilematch/visualize.hpp"

#endif  // TILEMATCH_TILEMATCH_HPP
