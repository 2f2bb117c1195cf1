// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfr/parallel.hpp"

#include <omp.h>

namespace lfr {

int num_threads() { return omp_get_max_threads(); }

void set_num_threads(int n) { omp_set_num_threads(n < 1 ? omp_get_num_procs() : n); }

int hardware_threads() { return omp_get_num_procs(); }

}  // namespace lfr
