// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_SOLVERS_HPP
#define KRYLOV_SOLVERS_HPP

#include "krylov/solvers/fgmres.hpp"
#include "krylov/solvers/gcr.hpp"
#include "krylov/solvers/gmres.hpp"
#include "krylov/solvers/lgmres.hpp"
#include "krylov/solvers/simpler.hpp"
#include "krylov/solvers/weighted.hpp"

#endif  // KRYLOV_SOLVERS_HPP
