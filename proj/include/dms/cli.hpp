// Copyright 2026 The dmsim Authors
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

#include <iosfwd>
#include <string>
#include <vector>

#include "dms/campaigns.hpp"

namespace dms::cli {

/// Flat key=value configuration file; unknown keys or unparsable values
/// throw ConfigError with the offending line. Lengths are in micrometers and
/// angles in degrees at this boundary.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

CampaignConfig load_config(const std::string& path);

/// Dispatch a full command line (without argv[0]). Returns the process exit
/// status: 0 success, 2 usage error, 1 runtime failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dms::cli
