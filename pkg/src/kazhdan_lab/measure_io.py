"""Measure description files (TOML) and coefficient CSV export.

A file holds any of the sections below; the measure is their sum::

    domain = "T"
    label = "example"

    [atoms]
    points = ["0", "1/2"]          # anything CirclePoint.parse accepts
    masses = [0.5, [0.25, 0.0]]    # reals or [re, im]

    [density]
    kind = "lebesgue"              # or "poisson" (with r) or "samples" (with values)
    weight = 0.5
    grid = 65536

    [bernoulli]
    epsilon = 0.05                 # or weights = [...]
    depth = 40
    weight = 1.0

    [riesz]
    sequence = "lacunary:3^k+k"    # or frequencies = [...]
    coefficient = 1.0              # or coefficients = [...]
    depth = 6
    grid = 65536
"""

from __future__ import annotations

import csv
import json
import sys

import numpy as np

from .errors import SchemaError
from .fixedpoint import CirclePoint
from .measures import (
    CIRCLE,
    Atom,
    AtomicFactor,
    CircleDensity,
    SpectralMeasure,
    bernoulli_weights,
    bernoulli_witness,
    fourier_coefficients,
    riesz_product,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

_SECTIONS = {"domain", "label", "atoms", "density", "bernoulli", "riesz"}


def _mass(value) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise SchemaError("complex masses are written [re, im]")
        return complex(float(value[0]), float(value[1]))
    return complex(float(value))


def _plain(z: complex):
    return z.real if z.imag == 0 else z


def measure_from_dict(data: dict) -> SpectralMeasure:
    from .weyl import IntegerSequence

    unknown = set(data) - _SECTIONS
    if unknown:
        raise SchemaError(f"unknown measure keys {sorted(unknown)}")
    if data.get("domain", CIRCLE) != CIRCLE:
        raise SchemaError("measure files describe circle measures only")
    try:
        atoms = []
        if "atoms" in data:
            pts, masses = data["atoms"]["points"], data["atoms"]["masses"]
            if len(pts) != len(masses):
                raise SchemaError("atoms need one mass per point")
            atoms = [Atom(CirclePoint.parse(str(p)), _plain(_mass(m))) for p, m in zip(pts, masses)]
        density = None
        if "density" in data:
            d = data["density"]
            kind = d.get("kind", "lebesgue")
            grid = int(d.get("grid", 2**16))
            weight = float(d.get("weight", 1.0))
            if kind == "lebesgue":
                density = CircleDensity.lebesgue(weight, grid)
            elif kind == "poisson":
                density = CircleDensity.poisson(float(d["r"]), weight, grid)
            elif kind == "samples":
                density = CircleDensity.from_samples(weight * np.asarray(d["values"], dtype=float))
            else:
                raise SchemaError(f"unknown density kind {kind!r}")
        factors = ()
        meta = {}
        if "bernoulli" in data:
            b = data["bernoulli"]
            depth = int(b["depth"])
            weights = b.get("weights") or bernoulli_weights(float(b["epsilon"]), depth)
            witness = bernoulli_witness([float(w) for w in weights], depth)
            factors = witness.factors
            meta.update(witness.meta)
            w = float(b.get("weight", 1.0))
            if w != 1.0:
                factors = factors + (AtomicFactor((Atom(CirclePoint.zero(), w),)),)
        if "riesz" in data:
            if density is not None:
                raise SchemaError("[riesz] and [density] both define the density")
            r = data["riesz"]
            depth = int(r["depth"])
            if "frequencies" in r:
                freqs = [int(m) for m in r["frequencies"]]
            else:
                freqs = IntegerSequence.parse(r["sequence"]).terms(depth + 1)[1:]
            coeffs = r.get("coefficients") or [float(r.get("coefficient", 1.0))] * depth
            riesz = riesz_product(freqs, coeffs, depth, int(r.get("grid", 2**16)))
            density = riesz.density.scaled(float(r.get("weight", 1.0)))
            meta.update(riesz.meta)
    except KeyError as exc:
        raise SchemaError(f"missing measure key {exc}") from exc
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    return SpectralMeasure(CIRCLE, 1, tuple(atoms), density, factors, data.get("label", ""), meta)


def load_measure(path) -> SpectralMeasure:
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise SchemaError(f"{path}: {exc}") from exc
    return measure_from_dict(data)


def _toml_value(v) -> str:
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, complex):
        return f"[{v.real!r}, {v.imag!r}]"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def measure_to_toml(measure: SpectralMeasure) -> str:
    """Serialise a circle measure back into the file format.

    Factor products are written as a [bernoulli] section, so only measures
    whose factors are two-point factors with recorded weights round-trip.
    """
    lines = [f"domain = {_toml_value(measure.domain)}", f"label = {_toml_value(measure.label)}"]
    if measure.atoms:
        lines += ["", "[atoms]",
                  "points = " + _toml_value([a.point.describe() for a in measure.atoms]),
                  "masses = " + _toml_value([complex(a.mass) if complex(a.mass).imag else complex(a.mass).real
                                             for a in measure.atoms])]
    dens = measure.density
    if dens is not None:
        spec = dens.spec
        if spec.get("kind") == "riesz":
            lines += ["", "[riesz]", "frequencies = " + _toml_value(spec["frequencies"]),
                      "coefficients = " + _toml_value(spec["coefficients"]),
                      f"depth = {len(spec['frequencies'])}", f"grid = {dens.grid_size}"]
        else:
            kind = spec.get("kind", "samples")
            lines += ["", "[density]", f"kind = {_toml_value(kind)}", f"grid = {dens.grid_size}"]
            if kind in ("lebesgue", "poisson"):
                lines.append(f"weight = {_toml_value(complex(spec.get('weight', 1.0)).real)}")
            if kind == "poisson":
                lines.append(f"r = {_toml_value(spec['r'])}")
            if kind == "samples":
                lines.append("values = " + _toml_value(np.real(dens.values).tolist()))
    if measure.factors:
        weights, scale = [], 1.0
        for f in measure.factors:
            if f.weight is not None:
                weights.append(f.weight)
            elif len(f.atoms) == 1 and f.atoms[0].point.word == 0 and complex(f.atoms[0].mass).imag == 0:
                scale *= complex(f.atoms[0].mass).real
            else:
                raise SchemaError("only two-point factor products can be written")
        lines += ["", "[bernoulli]", "weights = " + _toml_value(weights), f"depth = {len(weights)}"]
        if scale != 1.0:
            lines.append(f"weight = {_toml_value(scale)}")
    return "\n".join(lines) + "\n"


def write_coefficients_csv(path, measure: SpectralMeasure, ns) -> None:
    values = fourier_coefficients(measure, ns)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "re", "im"])
        for n, v in zip(ns, values):
            w.writerow([int(n), repr(float(v.real)), repr(float(v.imag))])
