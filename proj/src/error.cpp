// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/error.hpp"

namespace mfavis {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::domain: return "domain";
    case ErrorKind::partition: return "partition";
    case ErrorKind::io: return "io";
    case ErrorKind::format: return "format";
    case ErrorKind::camera: return "camera";
    case ErrorKind::pipeline: return "pipeline";
    case ErrorKind::numeric: return "numeric";
  }
  return "unknown";
}

}  // namespace mfavis
