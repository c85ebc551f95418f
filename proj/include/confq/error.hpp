// Copyright 2026 The confq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <stdexcept>
#include <string>

namespace confq {

enum class ErrorCode {
  InvalidArgument = 1,
  Parse,
  Schema,
  Geometry,
  Topology,
  Numeric,
  Io,
};

/// Base of every exception thrown by the core library. The C API maps
/// `code()` onto its status enum one to one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define CONFQ_DEFINE_ERROR(Name, Code)                                  \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& message) : Error(Code, message) {} \
  };

CONFQ_DEFINE_ERROR(InvalidArgument, ErrorCode::InvalidArgument)
CONFQ_DEFINE_ERROR(ParseError, ErrorCode::Parse)
CONFQ_DEFINE_ERROR(SchemaError, ErrorCode::Schema)
CONFQ_DEFINE_ERROR(GeometryError, ErrorCode::Geometry)
CONFQ_DEFINE_ERROR(TopologyError, ErrorCode::Topology)
CONFQ_DEFINE_ERROR(NumericError, ErrorCode::Numeric)
CONFQ_DEFINE_ERROR(IoError, ErrorCode::Io)

#undef CONFQ_DEFINE_ERROR

}  // namespace confq
