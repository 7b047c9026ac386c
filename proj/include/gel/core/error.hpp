// Copyright (c) 2026, The gel authors.
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

#include <stdexcept>
#include <string>

namespace gel {

/// Bad configuration, bad command-line usage, or a mis-shaped model.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A layer composition whose shapes do not line up. Raised at build time.
struct shape_error : config_error {
    using config_error::config_error;
};

/// Unreadable or malformed input data (files, corpora, fonts).
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// NaN/Inf encountered during optimization.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace gel
