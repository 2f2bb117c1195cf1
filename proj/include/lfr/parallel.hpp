// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace lfr {

/// Worker count used by every OpenMP region in the library.
int num_threads();

/// Sets the worker count; values < 1 reset to the hardware default.
void set_num_threads(int n);

int hardware_threads();

}  // namespace lfr
