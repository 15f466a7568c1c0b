// Copyright 2026 The partdp Authors
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

// Umbrella header for the library (HTTP pieces excluded; include
// partdp/http_api.hpp and partdp/server_config.hpp for those).

#pragma once

#include "partdp/analysis.hpp"
#include "partdp/dataset.hpp"
#include "partdp/dp.hpp"
#include "partdp/error.hpp"
#include "partdp/explain.hpp"
#include "partdp/json_io.hpp"
#include "partdp/mcda.hpp"
#include "partdp/policy.hpp"
#include "partdp/privacy_rating.hpp"
#include "partdp/random.hpp"
#include "partdp/service.hpp"
#include "partdp/synthetic.hpp"
