// SPDX-License-Identifier: Apache-2.0
//
// swpt - sensing-assisted wireless power transfer toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#ifndef SWPT_SWPT_HPP
#define SWPT_SWPT_HPP

#include "array_channel.hpp"
#include "common.hpp"
#include "echo_estimation.hpp"
#include "energy_design.hpp"
#include "fisher_crb.hpp"
#include "harness/config.hpp"
#include "harness/simulation.hpp"
#include "harness/sweep.hpp"
#include "sdp.hpp"
#include "sensing_design.hpp"

#endif
