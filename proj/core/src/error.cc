// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#include "anssel/error.h"

namespace anssel {

ExitCode exit_code(const Error& e) {
  if (dynamic_cast<const NumericError*>(&e)) return ExitCode::kNumeric;
  if (dynamic_cast<const ConfigError*>(&e)) return ExitCode::kUsage;
  return ExitCode::kData;
}

}  // namespace anssel
