/* Copyright (c) 2026 The SGDE-LFA Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace sgde {

/// Flat "key = value" settings. Keys are unique; later duplicates are an error.
using ConfigMap = std::map<std::string, std::string>;

/// '#' starts a comment anywhere on a line; blank lines are skipped.
/// Throws std::invalid_argument naming the offending line.
ConfigMap parse_config(std::istream& in);
ConfigMap load_config(const std::filesystem::path& path);

}  // namespace sgde
