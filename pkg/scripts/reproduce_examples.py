"""Print the headline numbers of the worked examples.

Covers the dyadic Bernoulli witness, the sqrt2 real-line witness, the
Riesz product on 3^k + k, the atom certificate on 2^k + k, Weyl sums, the
diagonal tensor family and coefficient decay for both Lie groups.

    python scripts/reproduce_examples.py
"""

import numpy as np

from kazhdan_lab.fixedpoint import CirclePoint
from kazhdan_lab.groups import HeisenbergElement, WindowFunction, affine_decay_scan, affine_window
from kazhdan_lab.groups import heisenberg_decay_scan, lemma_g_witness
from kazhdan_lab.kazhdan import bernoulli_verdict, example_b_certificate, real_line_witness
from kazhdan_lab.measures import CircleDensity, SpectralMeasure, fourier_coefficients, riesz_product
from kazhdan_lab.tensor import RepSequence, diagonal_slot, prop_4_3_diagnostic
from kazhdan_lab.weyl import IntegerSequence, weyl_criterion_scan


def bernoulli():
    print("dyadic Bernoulli witness, J = 40, k <= 30")
    for eps in (0.5, 0.1, 0.02):
        v = bernoulli_verdict(eps, K=30, depth=40)
        print(f"  eps = {eps:<5} sup |s(2^k) - 1| = {v.defect:.6f}")


def real_line():
    print("real-line witness for {k + sqrt2}")
    for eps in (2.0, 0.1, 0.01, 1e-9):
        v = real_line_witness(eps, window=1000)
        print(f"  eps = {eps:<6g} b = {v.trace[0]['b']:<11d} defect = {v.defect:.3e}")


def riesz():
    freqs = IntegerSequence.parse("lacunary:3^k+k").terms(7)[1:]
    m = riesz_product(freqs, [1.0] * 6, grid_size=4096)
    vals = fourier_coefficients(m, [0, *freqs, 15]).real
    print(f"Riesz product on {freqs}")
    print(f"  s(0) = {vals[0]:.3f}, s(m_k) = {np.round(vals[1:-1], 3).tolist()}, s(15) = {vals[-1]:.3f}")


def certificate():
    m = SpectralMeasure.circle([("0", 0.95)], density=CircleDensity.poisson(0.5, 0.05))
    v = example_b_certificate(m, K=20)
    print(f"certificate on 2^k + k: {v.kind}, defect {v.defect:.4f}, atom estimate {v.atom_estimate:.4f}")


def weyl():
    seq = IntegerSequence.parse("poly:1,0,0")
    for name in ("sqrt2", "golden"):
        mags = [r.magnitude for r in weyl_criterion_scan(seq, CirclePoint.parse(name), 4, 10**5)]
        print(f"Weyl sums of k^2 at {name}, N = 1e5: {np.round(mags, 5).tolist()}")
    third = weyl_criterion_scan(IntegerSequence.parse("lacunary:2^k"), CirclePoint.parse("1/3"), 1, 4096)
    print(f"Weyl sum of 2^k at 1/3, N = 4096: {third[0].magnitude:.3f}")


def tensor():
    diag = prop_4_3_diagnostic(RepSequence(tuple(diagonal_slot(n) for n in range(1, 9))))
    print(f"diagonal tensor family v_n: {np.round(diag.values, 4).tolist()}")


def groups():
    g = WindowFunction.gaussian()
    scan = heisenberg_decay_scan(1.0, g, g, [0.0, 5.0, 10.0])
    print(f"Schroedinger coefficient |<pi(0,0,p)u,u>| at p = 0, 5, 10: {scan.magnitudes.tolist()}")
    f = affine_window()
    print(f"affine coefficient decay factor b: 0 -> 50: {affine_decay_scan('+', f, f, [0.0, 50.0]).decay_factor:.2e}")
    Q = [HeisenbergElement(t, [q], [p]) for t, q, p in [(3, 10, 0.5), (0, -4, 1.0)]]
    v = lemma_g_witness(Q, 0.1)
    print(f"bounded-p Heisenberg set: witness defect {v.defect:.4f} < 0.1, atom {v.atom_estimate}")


if __name__ == "__main__":
    for section in (bernoulli, real_line, riesz, certificate, weyl, tensor, groups):
        section()
