// Copyright 2026 The summon-cpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "summon/common.hpp"
#include "summon/rng.hpp"
#include "summon/geometry.hpp"
#include "summon/spatial.hpp"
#include "summon/sdf.hpp"
#include "summon/dbscan.hpp"
#include "summon/contact.hpp"
#include "summon/assets.hpp"
#include "summon/placement.hpp"
#include "summon/completion.hpp"
#include "summon/metrics.hpp"
#include "summon/io.hpp"
#include "summon/pipeline.hpp"
