// Copyright 2026 The vsm-probe Authors.
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
#include <utility>

namespace vsm {

// Root of every error the library raises. Each subclass names one failure
// condition so callers (and the CLI) can map it to a precise message.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define VSM_DEFINE_ERROR(Name)           \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

// Data assets and files.
VSM_DEFINE_ERROR(MissingLocaleData);
VSM_DEFINE_ERROR(SchemaError);
VSM_DEFINE_ERROR(MissingFile);
VSM_DEFINE_ERROR(IoError);

// Gateway.
VSM_DEFINE_ERROR(TransportError);
VSM_DEFINE_ERROR(CacheMiss);
VSM_DEFINE_ERROR(AuthError);
VSM_DEFINE_ERROR(InvalidPolicy);

// Collection.
VSM_DEFINE_ERROR(ConfigError);
VSM_DEFINE_ERROR(IntegrityError);
VSM_DEFINE_ERROR(EmptyInput);

// Scoring.
VSM_DEFINE_ERROR(DomainError);
VSM_DEFINE_ERROR(IncompleteSet);

// Metrics.
VSM_DEFINE_ERROR(LengthMismatch);
VSM_DEFINE_ERROR(DegenerateInput);
VSM_DEFINE_ERROR(InsufficientNations);
VSM_DEFINE_ERROR(NationMismatch);
VSM_DEFINE_ERROR(ZeroHumanDispersion);
VSM_DEFINE_ERROR(CoincidentCentroids);
VSM_DEFINE_ERROR(TooFewPoints);
VSM_DEFINE_ERROR(ZeroHumanReference);

// Reporting.
VSM_DEFINE_ERROR(UnknownModel);

#undef VSM_DEFINE_ERROR

// A metric failure inside a comparison matrix, tagged with the set pair that
// produced it. `what()` carries both labels and the underlying message.
class PairError : public Error {
 public:
  PairError(std::string first, std::string second, const std::string& cause)
      : Error("[" + first + " vs " + second + "] " + cause),
        first_(std::move(first)),
        second_(std::move(second)) {}

  const std::string& first() const noexcept { return first_; }
  const std::string& second() const noexcept { return second_; }

 private:
  std::string first_;
  std::string second_;
};

}  // namespace vsm
