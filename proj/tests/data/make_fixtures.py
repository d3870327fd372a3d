#!/usr/bin/env python3
"""Regenerate the FCIDUMP / reference / amplitude fixtures under tests/data.

Requires PySCF. Not needed to build or run the C++ test suite; the outputs
are checked in.
"""
import json
import os
import sys

import numpy as np
from pyscf import cc, fci, gto, mp, scf
from pyscf.cc import ccsd_t
from pyscf.tools import fcidump

HERE = os.path.dirname(os.path.abspath(__file__))


def h_chain(n, d):
    return [("H", (0.0, 0.0, i * d)) for i in range(n)]


SYSTEMS = {
    "h2": dict(atom=h_chain(2, 0.74), basis="sto-6g", fci=True, group="D2h"),
    "h4": dict(atom=h_chain(4, 1.0), basis="sto-6g", fci=True, group="D2h"),
    "h8": dict(atom=h_chain(8, 1.0), basis="sto-6g", fci=True, group="D2h"),
    "h10": dict(atom=h_chain(10, 1.0), basis="sto-6g", fci=True, group="D2h"),
    "h10_stretched": dict(atom=h_chain(10, 1.5), basis="sto-6g", fci=True, group="D2h"),
    # CCCBDB experimental bond length.
    "lih_ccpcvdz": dict(atom=[("Li", (0, 0, 0)), ("H", (0, 0, 1.5949))],
                        basis={"Li": "cc-pcvdz", "H": "cc-pvdz"}, fci=False,
                        group="C2v"),
}


def spin_amplitudes(t1, t2, nocc, norb):
    """Spatial closed-shell amplitudes -> blocked-spin spin-orbital records."""
    nvir = norb - nocc
    rec1, rec2 = [], []
    for s in (0, 1):
        off = s * norb
        for i in range(nocc):
            for a in range(nvir):
                if t1[i, a] != 0.0:
                    rec1.append([i + off, a + nocc + off, float(t1[i, a])])
    for s in (0, 1):
        off = s * norb
        for i in range(nocc):
            for j in range(i + 1, nocc):
                for a in range(nvir):
                    for b in range(a + 1, nvir):
                        v = t2[i, j, a, b] - t2[i, j, b, a]
                        if v != 0.0:
                            rec2.append([i + off, j + off, a + nocc + off,
                                         b + nocc + off, float(v)])
    for i in range(nocc):
        for j in range(nocc):
            for a in range(nvir):
                for b in range(nvir):
                    v = t2[i, j, a, b]
                    if v != 0.0:
                        rec2.append([i, j + norb, a + nocc, b + nocc + norb,
                                     float(v)])
    return rec1, rec2


def export(name, recipe):
    out = os.path.join(HERE, name)
    os.makedirs(out, exist_ok=True)
    mol = gto.M(atom=recipe["atom"], basis=recipe["basis"], symmetry=recipe["group"],
                unit="Angstrom", verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    fcidump.from_scf(mf, os.path.join(out, "FCIDUMP"), tol=1e-14,
                     molpro_orbsym=True)
    ref = {"system": name, "basis": str(recipe["basis"]),
           "e_hf": mf.e_tot, "e_nuc": mol.energy_nuc()}
    pt = mp.MP2(mf).run()
    ref["e_mp2"] = pt.e_tot
    mycc = cc.CCSD(mf)
    mycc.conv_tol = 1e-12
    mycc.conv_tol_normt = 1e-10
    mycc.max_cycle = 500
    mycc.kernel()
    ref["e_ccsd"] = mycc.e_tot
    ref["e_ccsdt"] = mycc.e_tot + ccsd_t.kernel(mycc, mycc.ao2mo())
    ref["e_fci"] = fci.FCI(mf).kernel()[0] if recipe["fci"] else None
    with open(os.path.join(out, "reference.json"), "w") as f:
        json.dump(ref, f, indent=2)
    nocc = mol.nelectron // 2
    norb = mf.mo_coeff.shape[1]
    r1, r2 = spin_amplitudes(mycc.t1, mycc.t2, nocc, norb)
    amp = {"n_orb": norb, "n_occ": nocc, "convention": "blocked-spin",
           "t1": r1, "t2": r2}
    with open(os.path.join(out, "amplitudes.ampjson"), "w") as f:
        json.dump(amp, f)
    print(name, json.dumps(ref))


if __name__ == "__main__":
    names = sys.argv[1:] or list(SYSTEMS)
    for n in names:
        export(n, SYSTEMS[n])
