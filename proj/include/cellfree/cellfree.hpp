// SPDX-License-Identifier: Apache-2.0
//
// cellfree: multi-CPU cell-free massive MIMO downlink simulator
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


#ifndef CELLFREE_CELLFREE_HPP
#define CELLFREE_CELLFREE_HPP

#include "cellfree/types.hpp"
#include "cellfree/random.hpp"
#include "cellfree/scenario.hpp"
#include "cellfree/channel.hpp"
#include "cellfree/pilot.hpp"
#include "cellfree/clustering.hpp"
#include "cellfree/spectral_efficiency.hpp"
#include "cellfree/oracle.hpp"
#include "cellfree/harness/config.hpp"
#include "cellfree/harness/experiment.hpp"
#include "cellfree/harness/output.hpp"
#include "cellfree/harness/presets.hpp"

#endif // CELLFREE_CELLFREE_HPP
