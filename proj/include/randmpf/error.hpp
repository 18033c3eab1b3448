// Copyright 2026 The randmpf Authors
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

namespace randmpf {

/// Base class of every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operands of incompatible shape, or a matrix larger than the dense cap.
struct DimensionError : Error {
    using Error::Error;
};

/// Malformed input: non-Hermitian term, repeated nodes, bad labels.
struct InvalidArgument : Error {
    using Error::Error;
};

/// Vandermonde system rejected by its condition estimate.
struct IllConditionedError : Error {
    using Error::Error;
};

/// Newton iteration for the matching composition constraint did not converge.
struct NoRealSolutionError : Error {
    using Error::Error;
};

/// A numerical diagnostic failed (eigensolver, series truncation, fit window).
struct NumericError : Error {
    using Error::Error;
};

/// Configuration or file-format problem.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace randmpf
