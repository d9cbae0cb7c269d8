// SPDX-License-Identifier: Apache-2.0
//
// pilotload: pilot book construction and load-region analysis
// Copyright (C) 2026 The pilotload authors
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

#ifndef PILOTLOAD_ERRORS_HPP
#define PILOTLOAD_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace pilotload {

enum class ErrorKind {
    MissingKey,
    NonPositiveGain,
    DimensionMismatch,
    NonPositiveTarget,
    LengthMismatch,
    NotSorted,
    TauOutOfRange,
    MajorizationViolation,
    RegionViolation,
    MajorizationCapViolation,
    NumericalRankLoss,
    InfeasibleFrame,
    EmptyGroup,
    InvalidGrouping,
    UnsetPower,
    NonConvergence,
    BracketFailure,
    GridTooFine,
    ParseError,
    InvalidArgument,
};

inline std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::MissingKey: return "MissingKey";
    case ErrorKind::NonPositiveGain: return "NonPositiveGain";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonPositiveTarget: return "NonPositiveTarget";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NotSorted: return "NotSorted";
    case ErrorKind::TauOutOfRange: return "TauOutOfRange";
    case ErrorKind::MajorizationViolation: return "MajorizationViolation";
    case ErrorKind::RegionViolation: return "RegionViolation";
    case ErrorKind::MajorizationCapViolation: return "MajorizationCapViolation";
    case ErrorKind::NumericalRankLoss: return "NumericalRankLoss";
    case ErrorKind::InfeasibleFrame: return "InfeasibleFrame";
    case ErrorKind::EmptyGroup: return "EmptyGroup";
    case ErrorKind::InvalidGrouping: return "InvalidGrouping";
    case ErrorKind::UnsetPower: return "UnsetPower";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::GridTooFine: return "GridTooFine";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what)
        , kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace pilotload

#endif
