// Copyright 2026 The chronoret Authors
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

namespace chronoret {

// Every library failure derives from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CHRONORET_DEFINE_ERROR(Name)       \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  };

CHRONORET_DEFINE_ERROR(InvalidDate)
CHRONORET_DEFINE_ERROR(EmptyDocument)
CHRONORET_DEFINE_ERROR(UnknownTimestamp)
CHRONORET_DEFINE_ERROR(InvalidRange)
CHRONORET_DEFINE_ERROR(DimMismatch)
CHRONORET_DEFINE_ERROR(FormatError)
CHRONORET_DEFINE_ERROR(BuildError)
CHRONORET_DEFINE_ERROR(NoEligibleNegatives)
CHRONORET_DEFINE_ERROR(NumericalError)
CHRONORET_DEFINE_ERROR(NoData)
CHRONORET_DEFINE_ERROR(MissingJudgment)
CHRONORET_DEFINE_ERROR(MarkerConflict)
CHRONORET_DEFINE_ERROR(InvalidArgument)

#undef CHRONORET_DEFINE_ERROR

}  // namespace chronoret
