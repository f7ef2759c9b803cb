// Copyright 2026 The lcorr Authors
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

#include "lcorr/bits.hpp"
#include "lcorr/boolfn.hpp"
#include "lcorr/corrector.hpp"
#include "lcorr/descriptor.hpp"
#include "lcorr/errors.hpp"
#include "lcorr/harness.hpp"
#include "lcorr/influence.hpp"
#include "lcorr/oracle.hpp"
#include "lcorr/random.hpp"
#include "lcorr/report.hpp"
#include "lcorr/sampling.hpp"
#include "lcorr/stats.hpp"
#include "lcorr/typicality.hpp"
