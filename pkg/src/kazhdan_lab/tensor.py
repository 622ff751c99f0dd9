"""Truncated incomplete tensor products ``(x)_n pi_n`` anchored at unit vectors a_n.

Nothing here materialises the tensor space: every quantity is a product or
sum of per-slot scalars ``<pi_n(g) x_n, y_n>``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .config import ScheduleConfig, TensorConfig
from .errors import ConsistencyError, ElementarySpecError, RepresentationError, SchemaError
from .reps import UnitaryRep, decompose, inner, mean_square_coefficient

_DEFAULTS = TensorConfig()


@dataclass(frozen=True, eq=False)
class RepSequence:
    """Slots ``(pi_n, a_n)`` for n = 1..L, all representations of one group."""

    entries: tuple

    def __post_init__(self):
        entries = tuple((rep, np.asarray(a, dtype=complex)) for rep, a in self.entries)
        object.__setattr__(self, "entries", entries)
        groups = {(rep.group, len(rep.generators)) for rep, _ in entries}
        if len(groups) > 1:
            raise RepresentationError("all slots must represent the same group")
        for n, (rep, a) in enumerate(entries, start=1):
            if a.shape != (rep.dim,):
                raise RepresentationError(f"anchor of slot {n} has the wrong dimension")
            if abs(np.linalg.norm(a) - 1) > 1e-12:
                raise RepresentationError(f"anchor of slot {n} is not a unit vector")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def dims(self) -> list:
        return [rep.dim for rep, _ in self.entries]


def slot_coefficients(seq: RepSequence, g) -> np.ndarray:
    """``<pi_n(g) a_n, a_n>`` for every slot; g is a list of generator exponents."""
    return np.array([inner(rep.act(g, a), a) for rep, a in seq.entries], dtype=complex)


# ---------------------------------------------------------------------------
# convergence of sum |1 - <pi_n(g) a_n, a_n>|
# ---------------------------------------------------------------------------


@dataclass
class ConvergenceTrace:
    """Partial sums of ``sum_n |1 - <pi_n(g) a_n, a_n>|`` with a heuristic tail.

    ``divergence_suspected`` is set when late increments exceed the declared
    decay model (fitted on the first half) by more than the slack factor. It
    is a heuristic at finite L, not a proof.
    """

    g: list
    terms: np.ndarray
    partial: np.ndarray
    model: str
    parameter: float
    tail_estimate: float
    divergence_suspected: bool
    heuristic: bool = True


def _model_profile(model: str, parameter: float, n: np.ndarray) -> np.ndarray:
    if model == "geometric":
        if not 0 < parameter < 1:
            raise ValueError("geometric decay needs a ratio in (0, 1)")
        return parameter ** n.astype(float)
    if model == "power":
        if parameter <= 1:
            raise ValueError("power decay needs an exponent above 1")
        return n.astype(float) ** (-parameter)
    raise ValueError(f"unknown decay model {model!r}")


def c0_series(seq: RepSequence, g, model: str = "geometric", parameter: float = 0.5,
              slack: float = _DEFAULTS.decay_slack) -> ConvergenceTrace:
    terms = np.abs(1 - slot_coefficients(seq, g))
    partial = np.cumsum(terms)
    L = len(terms)
    n = np.arange(1, L + 1)
    profile = _model_profile(model, parameter, n)
    half = max(1, L // 2)
    scale = float(np.max(terms[:half] / profile[:half])) if L else 0.0
    late = terms[half:] > slack * scale * profile[half:] + 1e-15
    suspected = bool(np.any(late))
    if model == "geometric":
        tail = scale * parameter ** (L + 1) / (1 - parameter)
    else:
        tail = scale * L ** (1 - parameter) / (parameter - 1)
    return ConvergenceTrace(list(np.atleast_1d(g)), terms, partial, model, parameter, float(tail), suspected)


# ---------------------------------------------------------------------------
# coefficients and defects
# ---------------------------------------------------------------------------


def _vector_for(spec, n: int, anchor: np.ndarray) -> np.ndarray:
    v = spec.get(n)
    if v is None:
        return anchor
    v = np.asarray(v, dtype=complex)
    if v.shape != anchor.shape:
        raise ElementarySpecError(f"slot {n} vector has the wrong dimension")
    return v


def elementary_coefficient(seq: RepSequence, g, x=None, y=None) -> complex:
    """``prod_n <pi_n(g) x_n, y_n>`` for elementary vectors.

    ``x`` and ``y`` map 1-based slot indices to replacement vectors; slots not
    mentioned carry the anchor. Anything else is not an elementary vector.
    """
    specs = []
    for s in (x, y):
        s = {} if s is None else s
        if not isinstance(s, dict):
            raise ElementarySpecError("an elementary vector is given as {slot: vector}")
        bad = [k for k in s if not isinstance(k, (int, np.integer)) or not 1 <= k <= len(seq)]
        if bad:
            raise ElementarySpecError(f"slots {bad} are outside 1..{len(seq)}")
        specs.append(s)
    value = 1 + 0j
    for n, (rep, a) in enumerate(seq.entries, start=1):
        value *= inner(rep.act(g, _vector_for(specs[0], n, a)), _vector_for(specs[1], n, a))
    return complex(value)


@dataclass
class TensorDefect:
    defect: float  # sup_g ||pi(g) a - a||
    bound: float  # sup_g 2 sum_n |1 - <pi_n(g) a_n, a_n>|
    per_element: list = field(default_factory=list)


def invariance_defect_tensor(seq: RepSequence, Q, slack: float = 1e-10) -> TensorDefect:
    """``sup_{g in Q} ||pi(g) a - a||`` with ``||.||^2 = 2 (1 - Re prod c_n)``.

    Each g is also checked against ``2 sum |1 - c_n|``; exceeding that bound
    would contradict an inequality that always holds, so it raises.
    """
    rows = []
    for g in Q:
        c = slot_coefficients(seq, g)
        sq = max(0.0, 2 * (1 - float(np.real(np.prod(c)))))
        bound = 2 * float(np.sum(np.abs(1 - c)))
        if sq > bound + slack:
            raise ConsistencyError(f"defect^2 {sq} exceeds 2 sum |1 - c_n| = {bound} at g={g}")
        rows.append({"g": list(np.atleast_1d(g).tolist()), "defect": float(np.sqrt(sq)), "bound": bound})
    return TensorDefect(max(r["defect"] for r in rows), max(r["bound"] for r in rows), rows)


@dataclass
class WeakMixingDiagnostic:
    values: list  # v_n, n = 1..L
    window: tuple
    minimum: float
    threshold: float
    criterion_met: bool  # min over the window below threshold; no limit claimed


def prop_4_3_diagnostic(seq: RepSequence, threshold: float = _DEFAULTS.weak_mixing_threshold,
                        window: tuple | None = None) -> WeakMixingDiagnostic:
    """``v_n``: invariant mean of ``|<pi_n(.) a_n, a_n>|^2``, i.e. ``sum_l ||P_l a_n||^4``.

    A liminf of 0 makes the product weakly mixing; at finite L only the window
    minimum is compared with the threshold.
    """
    values = []
    for rep, a in seq.entries:
        values.append(mean_square_coefficient(rep, decompose(rep), a, a))
    lo, hi = window or (1, len(values))
    minimum = min(values[lo - 1:hi])
    return WeakMixingDiagnostic(values, (lo, hi), minimum, threshold, minimum < threshold)


# ---------------------------------------------------------------------------
# per-level defect schedule
# ---------------------------------------------------------------------------


def defect_schedule(epsilon: float, levels: int, config: ScheduleConfig = ScheduleConfig()) -> list:
    """``eps_n = scale * eps^2 * ratio^n`` for n = 1..levels."""
    return [config.scale * epsilon**2 * config.ratio**n for n in range(1, levels + 1)]


def schedule_checks(eps_n, epsilon: float) -> dict:
    """Sum condition ``sum eps_n < eps^2 / 2`` and the windowed ratios
    ``sum_{j=n}^{2n} eps_j^2 / ((n+1) eps_n^2)`` for every n with 2n in range."""
    e = np.asarray(eps_n, dtype=float)
    total = float(np.sum(e))
    ratios = []
    for n in range(1, len(e) // 2 + 1):
        window = e[n - 1:2 * n]
        ratios.append(float(np.sum(window**2) / ((n + 1) * e[n - 1] ** 2)))
    return {"sum": total, "sum_ok": total < epsilon**2 / 2, "ratios": ratios}


# ---------------------------------------------------------------------------
# slot families
# ---------------------------------------------------------------------------


def rotation_slot(angle: float) -> tuple:
    """Real rotation by ``angle`` on C^2 anchored at e_1: ``c(k) = cos(k angle)``."""
    c, s = np.cos(angle), np.sin(angle)
    return UnitaryRep([np.array([[c, -s], [s, c]])]), np.array([1.0, 0.0])


def tilted_slot(angle: float, weight: float) -> tuple:
    """``diag(1, e^{i angle})`` anchored at ``(sqrt(1-w), sqrt(w))``.

    ``|1 - c(k)| = w |1 - e^{i k angle}| <= 2 w`` for every k.
    """
    U = np.diag([1.0, np.exp(1j * angle)])
    return UnitaryRep([U]), np.array([np.sqrt(1 - weight), np.sqrt(weight)])


def diagonal_slot(n: int) -> tuple:
    """n distinct eigenvalues ``e^{2 i pi j / n}`` with the uniform anchor; ``v = 1/n``."""
    U = np.diag(np.exp(2j * np.pi * np.arange(n) / n))
    return UnitaryRep([U]), np.full(n, 1 / np.sqrt(n))


# ---------------------------------------------------------------------------
# I/O
# ---------------------------------------------------------------------------


def load_sequence(text: str) -> RepSequence:
    """JSON ``{"slots": [{"phases": [...], "anchor": [...], "normalize": bool}]}``.

    Each slot is the diagonal representation of Z with eigenvalues
    ``exp(2 i pi phase)``; anchor entries are numbers or ``[re, im]`` pairs.
    """
    try:
        data = json.loads(text)
        entries = []
        for slot in data["slots"]:
            phases = np.asarray(slot["phases"], dtype=float)
            anchor = np.array([complex(*v) if isinstance(v, list) else complex(v) for v in slot["anchor"]])
            if "dimension" in slot and int(slot["dimension"]) != len(phases):
                raise SchemaError("slot dimension disagrees with its phases")
            if slot.get("normalize"):
                anchor = anchor / np.linalg.norm(anchor)
            entries.append((UnitaryRep([np.diag(np.exp(2j * np.pi * phases))]), anchor))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed slot description: {exc}") from exc
    return RepSequence(tuple(entries))


def write_diagnostic_csv(path, diagnostic: WeakMixingDiagnostic, trace: ConvergenceTrace) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "v_n", "c0_partial_sum"])
        for n, (v, s) in enumerate(zip(diagnostic.values, trace.partial), start=1):
            w.writerow([n, repr(float(v)), repr(float(s))])
