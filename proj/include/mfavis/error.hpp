// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mfavis {

enum class ErrorKind {
  parameter,
  domain,
  partition,
  io,
  format,
  camera,
  pipeline,
  numeric,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define MFAVIS_DEFINE_ERROR(Name, Kind)                                   \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

MFAVIS_DEFINE_ERROR(ParameterError, parameter)
MFAVIS_DEFINE_ERROR(DomainError, domain)
MFAVIS_DEFINE_ERROR(PartitionError, partition)
MFAVIS_DEFINE_ERROR(IoError, io)
MFAVIS_DEFINE_ERROR(FormatError, format)
MFAVIS_DEFINE_ERROR(CameraError, camera)
MFAVIS_DEFINE_ERROR(PipelineError, pipeline)
MFAVIS_DEFINE_ERROR(NumericError, numeric)

#undef MFAVIS_DEFINE_ERROR

}  // namespace mfavis
