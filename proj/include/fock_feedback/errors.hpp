/*
   Copyright 2026 The fock-feedback Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace fockfb {

/// A diagonal state with no population above the zero tolerance.
struct AllZeroError : std::runtime_error {
    explicit AllZeroError(const std::string &what) : std::runtime_error(what) {}
};

/// A measurement outcome was forced whose probability is numerically zero.
struct ImpossibleOutcome : std::runtime_error {
    explicit ImpossibleOutcome(const std::string &what)
        : std::runtime_error(what)
    {
    }
};

/// The state buffer outgrew the configured hard cap.
struct CapacityExceeded : std::runtime_error {
    explicit CapacityExceeded(const std::string &what)
        : std::runtime_error(what)
    {
    }
};

/// No admissible sine-band window was found below the scan limit.
struct WindowNotFound : std::runtime_error {
    explicit WindowNotFound(const std::string &what) : std::runtime_error(what)
    {
    }
};

} // namespace fockfb
