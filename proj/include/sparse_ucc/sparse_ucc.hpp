/*******************************************************************************
 * Copyright (c) 2026 The sparse_ucc Authors.                                  *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

/// \file sparse_ucc.hpp
/// Convenience header pulling in the whole library.

#include "sparse_ucc/error.hpp"
#include "sparse_ucc/integrals.hpp"
#include "sparse_ucc/determinant.hpp"
#include "sparse_ucc/hamiltonian.hpp"
#include "sparse_ucc/wavefunction.hpp"
#include "sparse_ucc/amplitudes.hpp"
#include "sparse_ucc/symmetry.hpp"
#include "sparse_ucc/circuit.hpp"
#include "sparse_ucc/fci.hpp"
#include "sparse_ucc/analysis.hpp"
#include "sparse_ucc/optimizer.hpp"
