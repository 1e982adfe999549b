// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "mfavis/error.hpp"
#include "mfavis/vec3.hpp"
#include "mfavis/render/camera.hpp"

namespace mfavis::cli {

enum ExitCode : int { kOk = 0, kBadArgs = 2, kIo = 3, kNumeric = 4 };

int exit_code_for(ErrorKind kind);

// Runs one command line (without the program name). Errors are reported as a
// single "error: <kind>: <reason>" line on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// View used when no camera file is given: oblique, z up, whole domain in frame.
Camera default_camera(const Aabb& domain);

}  // namespace mfavis::cli
