"""Default numerical settings, grouped per module.

Every report written by the CLI embeds the config instances it used, so these
values double as the audit record of tolerances.
"""

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class MeasureConfig:
    grid_size: int = 2**16
    mass_tol: float = 1e-12
    expansion_cap: int = 12  # max two-point factors expanded into 2^J atoms


@dataclass(frozen=True)
class WeylConfig:
    harmonics: int = 8
    tol: float = 0.05
    guard_bits: int = 28  # fixed-point thetas keep |n| < 2^(128 - guard_bits)


@dataclass(frozen=True)
class KazhdanConfig:
    atom_window: int = 10**4
    chain_slack: float = 1e-9
    bracket_slack: float = 1e-9
    example_b_threshold: float = 1.0 / 18.0
    default_window: int = 64
    real_line_window: int = 10**4
    max_denominator: int = 10**15


@dataclass(frozen=True)
class ReprConfig:
    cluster_tol: float = 1e-8
    unitary_tol: float = 1e-10
    residual_tol: float = 1e-8
    dimension_cap: int = 4096


@dataclass(frozen=True)
class TensorConfig:
    weak_mixing_threshold: float = 1e-3
    decay_slack: float = 10.0


@dataclass(frozen=True)
class ScheduleConfig:
    """Per-level defect schedule eps_n = scale * eps**2 * ratio**n.

    With scale = 1/4 and ratio = 1/2 the sum is eps**2/4, below eps**2/2, and
    the windowed ratio sum_{j=n}^{2n} eps_j^2 / ((n+1) eps_n^2) tends to 0.
    """

    scale: float = 0.25
    ratio: float = 0.5


@dataclass(frozen=True)
class GroupConfig:
    grid_points: int = 2**12
    half_width: float = 20.0
    quadrature_tol: float = 1e-10
    reduction_fraction: float = 1.0 / 8.0  # (Q, eps/8) bookkeeping of the Heisenberg reduction
    reduction_eps_max: float = 3.0


def as_dict(*configs):
    return {type(c).__name__: asdict(c) for c in configs}
