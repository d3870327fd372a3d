/*******************************************************************************
 * Copyright (c) 2026 The sparse_ucc Authors.                                  *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
// Walkthrough on H4/STO-6G: classical references, a CCSD-initialized
// circuit at a few determinant caps, and the 1/N_WF extrapolation.
//
//   demo [path/to/FCIDUMP]

#include <cstdio>
#include <string>

#include "sparse_ucc/sparse_ucc.hpp"

int main(int argc, char** argv) {
  using namespace sparse_ucc;
  const std::string path = argc > 1 ? argv[1] : SPARSE_UCC_DEMO_FCIDUMP;
  try {
    const auto ints = read_fcidump(path);
    const double e_hf = hf_energy(ints);
    const auto mp2 = mp2_amplitudes(ints);
    const auto cc = ccsd_solve(ints);
    const auto fci = fci_ground_state(ints, ints.n_occ(), ints.n_occ());
    std::printf("orbitals %d, electrons %d\n", ints.n_orb(), ints.n_elec());
    std::printf("E_HF            %.10f\n", e_hf);
    std::printf("MP2  corr (mHa) %10.3f\n", 1e3 * mp2.e_corr);
    std::printf("CCSD corr (mHa) %10.3f  (%d iterations)\n", 1e3 * cc.e_corr, cc.iterations);
    std::printf("FCI  corr (mHa) %10.3f\n", 1e3 * (fci.energy - e_hf));

    PoolOptions po;
    po.n_occ = ints.n_occ();
    po.n_orb = ints.n_orb();
    const auto pool = build_pool(po);
    const auto theta = amplitudes_to_parameters(cc.amplitudes, pool);
    CircuitTemplate tpl{&ints, reference_determinant(ints),
                        order_factors(make_factors(pool, theta), Ordering::magnitude())};
    std::printf("%zu factors, magnitude order\n", tpl.factors.size());

    const std::vector<std::size_t> grid{4, 6, 8, 10, 12, 16, 20, 24, 36};
    const auto sweep = nwf_sweep(tpl, grid);
    for (const auto& p : sweep.points)
      std::printf("  N_WF %3zu  corr %10.4f mHa\n", p.n_wf, 1e3 * p.e_corr);
    const auto fit = extrapolate(sweep, FitWindow::largest(6));
    std::printf("extrapolated UCC(CCSD) corr %.4f mHa\n", 1e3 * fit.c);
  } catch (const Error& e) {
    std::fprintf(stderr, "demo: %s\n", e.what());
    return 1;
  }
  return 0;
}
