import json
from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kazhdan_lab.errors import ElementarySpecError, RepresentationError, SchemaError
from kazhdan_lab.reps import UnitaryRep, random_unitary
from kazhdan_lab.tensor import (
    RepSequence,
    c0_series,
    defect_schedule,
    diagonal_slot,
    elementary_coefficient,
    invariance_defect_tensor,
    load_sequence,
    prop_4_3_diagnostic,
    rotation_slot,
    schedule_checks,
    tilted_slot,
    write_diagnostic_csv,
)


def random_sequence(rng, L, max_dim=3):
    entries = []
    for _ in range(L):
        d = int(rng.integers(1, max_dim + 1))
        a = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        entries.append((UnitaryRep([random_unitary(rng, d)]), a / np.linalg.norm(a)))
    return RepSequence(tuple(entries))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(-5, 5))
def test_elementary_coefficient_matches_dense_kronecker(seed, L, g):
    rng = np.random.default_rng(seed)
    seq = random_sequence(rng, L)
    slot = int(rng.integers(1, L + 1))
    d = seq.dims[slot - 1]
    x = {slot: rng.standard_normal(d) + 1j * rng.standard_normal(d)}
    y = {1: rng.standard_normal(seq.dims[0]) + 0j}
    got = elementary_coefficient(seq, [g], x, y)
    U = reduce(np.kron, [rep.power(g) for rep, _ in seq.entries])
    xv = reduce(np.kron, [x.get(n, a) for n, (_, a) in enumerate(seq.entries, start=1)])
    yv = reduce(np.kron, [y.get(n, a) for n, (_, a) in enumerate(seq.entries, start=1)])
    assert abs(got - np.vdot(yv, U @ xv)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12))
def test_defect_bound_everywhere(seed, L):
    rng = np.random.default_rng(seed)
    seq = random_sequence(rng, L)
    res = invariance_defect_tensor(seq, [[g] for g in range(-4, 5)])
    for row in res.per_element:
        assert row["defect"] ** 2 <= row["bound"] + 1e-12


def test_diagonal_family_closed_form():
    seq = RepSequence(tuple(diagonal_slot(n) for n in range(1, 25)))
    diag = prop_4_3_diagnostic(seq, threshold=0.05)
    np.testing.assert_allclose(diag.values, [1 / n for n in range(1, 25)], atol=1e-12)
    assert diag.criterion_met and diag.minimum == pytest.approx(1 / 24)


def test_c0_series_flags():
    fixed = RepSequence(tuple(rotation_slot(0.3) for _ in range(20)))
    assert c0_series(fixed, [1]).divergence_suspected
    decaying = RepSequence(tuple(tilted_slot(1.0, 0.5**n) for n in range(1, 21)))
    trace = c0_series(decaying, [1], "geometric", 0.5)
    assert not trace.divergence_suspected
    assert trace.partial[-1] < 2


def test_schedule_gives_small_defect():
    eps = 0.5
    e = defect_schedule(eps, 20)
    checks = schedule_checks(e, eps)
    assert checks["sum_ok"]
    # ratios for a geometric schedule with ratio 1/2 stay bounded
    assert max(checks["ratios"]) < 1.5
    # slots with |1 - c_n(g)| <= eps_n give ||pi(g) a - a|| < eps
    seq = RepSequence(tuple(tilted_slot(2.0, w / 2) for w in e))
    res = invariance_defect_tensor(seq, [[g] for g in range(-10, 11)])
    assert res.defect < eps


def test_elementary_spec_errors():
    seq = RepSequence((diagonal_slot(2), diagonal_slot(3)))
    with pytest.raises(ElementarySpecError):
        elementary_coefficient(seq, [1], {3: np.ones(2)})
    with pytest.raises(ElementarySpecError):
        elementary_coefficient(seq, [1], {1: np.ones(3)})
    with pytest.raises(ElementarySpecError):
        elementary_coefficient(seq, [1], [np.ones(2)])


def test_sequence_validation():
    with pytest.raises(RepresentationError):
        RepSequence(((UnitaryRep([np.eye(2)]), np.array([1.0, 1.0])),))
    with pytest.raises(RepresentationError):
        RepSequence((diagonal_slot(2), (UnitaryRep([np.eye(2), np.eye(2)], "Z^2"), np.array([1.0, 0]))))


def test_load_sequence(tmp_path):
    text = json.dumps({"slots": [{"phases": [0, 0.5], "anchor": [1, [0, 1]], "normalize": True},
                                 {"phases": [0.25], "anchor": [1]}]})
    seq = load_sequence(text)
    assert seq.dims == [2, 1]
    diag = prop_4_3_diagnostic(seq)
    assert diag.values == pytest.approx([0.5, 1.0])
    write_diagnostic_csv(tmp_path / "d.csv", diag, c0_series(seq, [1]))
    assert (tmp_path / "d.csv").read_text().startswith("n,v_n,c0_partial_sum\n")
    with pytest.raises(SchemaError):
        load_sequence('{"slots": [{"phases": [0]}]}')
