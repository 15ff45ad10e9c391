// Copyright 2026 The asap Authors.
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

#include <string>

#include "asap/json_io.hpp"

namespace asap {
namespace testutil {

inline std::string data_dir() { return ASAP_DATA_DIR; }

// Loads one of the three bundled experiment fixtures (1-based).
inline ProfileBundle load_experiment(int n) {
  static const char* kNames[] = {"exp1_compute_v5p.json", "exp2_hbm_v6e.json",
                                 "exp3_comm_v5e.json"};
  return load_profile_bundle(data_dir() + "/" + kNames[n - 1]);
}

inline DeviceRegistry load_registry() {
  return load_device_registry(data_dir() + "/devices.json");
}

inline DeviceSpec device_for(const ProfileBundle& bundle) {
  return resolve_device(load_registry(), bundle.experiment.device_type);
}

}  // namespace testutil
}  // namespace asap
