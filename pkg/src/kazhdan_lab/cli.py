"""Command-line front door: scenario files and per-family shortcuts.

Every report embeds the tool version, a hash of the fully resolved scenario
and the tolerances in force; there is no timestamp, so reruns are
byte-identical. Failures exit nonzero and print one JSON error record on
stderr with a code of SCHEMA, IO, COMPUTATION or CONSISTENCY.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import GroupConfig, KazhdanConfig, MeasureConfig, ReprConfig, ScheduleConfig, TensorConfig, WeylConfig, as_dict
from .errors import KazlabError, SchemaError
from .fixedpoint import CirclePoint
from .measure_io import load_measure, measure_from_dict, measure_to_toml, tomllib
from .measures import fourier_coefficients

EXIT_CODES = {"SCHEMA": 2, "IO": 3, "COMPUTATION": 4, "CONSISTENCY": 5}

KINDS = (
    "measure-eval",
    "weyl-scan",
    "kazhdan-witness",
    "kazhdan-certify",
    "rep-project",
    "tensor-diagnose",
    "heisenberg-decay",
    "affine-decay",
)

# allowed parameters and their defaults, per scenario kind
DEFAULTS = {
    "measure-eval": {"measure": None, "n_min": -16, "n_max": 16},
    "weyl-scan": {"seq": "poly:1,0,0", "theta": "sqrt2", "N": 100000, "harmonics": WeylConfig().harmonics},
    "kazhdan-witness": {"set": "lacunary:2^k", "epsilon": 0.05, "K": 30, "depth": 40, "window": 10000},
    "kazhdan-certify": {"set": "lacunary:2^k+k", "measure": None, "K": 20, "N": KazhdanConfig().atom_window},
    "rep-project": {"matrix": None, "operator": None, "dim": 6, "distinct": 4, "gap": 0.3, "cesaro_N": 0},
    "tensor-diagnose": {"slots": None, "family": "diagonal", "levels": 32, "g": 1,
                        "threshold": TensorConfig().weak_mixing_threshold},
    "heisenberg-decay": {"lambda": 1.0, "window": "gaussian", "pmax": 10.0, "steps": 11, "t": 0.0, "q": 0.0},
    "affine-decay": {"sign": "+", "window": "bump", "bmax": 50.0, "steps": 51, "a": 1.0},
}

# integer parameters that must be at least 1
POSITIVE = {"N", "K", "depth", "window", "harmonics", "levels", "dim", "distinct", "steps", "g"}

# the circle measure used when a certify scenario names none
DEFAULT_CERTIFY_MEASURE = {
    "label": "0.95 delta_1 + 0.05 lebesgue",
    "atoms": {"points": ["0"], "masses": [0.95]},
    "density": {"kind": "lebesgue", "weight": 0.05},
}


class IOFailure(KazlabError):
    code = "IO"


# ---------------------------------------------------------------------------
# scenario handling
# ---------------------------------------------------------------------------


def load_scenario(path) -> dict:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise IOFailure(f"cannot read scenario {path}: {exc}") from exc
    try:
        if path.suffix == ".json":
            data = json.loads(raw)
        else:
            data = tomllib.loads(raw.decode())
    except (ValueError, UnicodeDecodeError) as exc:
        raise SchemaError(f"scenario {path} is not valid {path.suffix or 'toml'}: {exc}") from exc
    base = path.parent
    for key in ("measure", "matrix", "operator", "slots", "window"):
        value = data.get("params", {}).get(key)
        if isinstance(value, str) and ("/" in value or "." in value) and not Path(value).is_absolute():
            if (base / value).exists():
                data["params"][key] = str(base / value)
    return data


def resolve(data: dict) -> dict:
    """Validate a scenario and fill in defaults."""
    if not isinstance(data, dict):
        raise SchemaError("scenario must be a table")
    unknown = set(data) - {"kind", "seed", "params", "output"}
    if unknown:
        raise SchemaError(f"unknown scenario keys {sorted(unknown)}")
    kind = data.get("kind")
    if kind not in KINDS:
        raise SchemaError(f"scenario kind must be one of {', '.join(KINDS)}")
    params = data.get("params", {})
    if not isinstance(params, dict):
        raise SchemaError("params must be a table")
    bad = set(params) - set(DEFAULTS[kind])
    if bad:
        raise SchemaError(f"unknown parameters for {kind}: {sorted(bad)}")
    merged = dict(DEFAULTS[kind])
    for key, value in params.items():
        default = merged[key]
        if isinstance(default, bool) or default is None or isinstance(default, str):
            pass
        elif isinstance(default, int) and not (isinstance(value, int) and not isinstance(value, bool)):
            raise SchemaError(f"parameter {key} must be an integer")
        elif isinstance(default, float) and not isinstance(value, (int, float)):
            raise SchemaError(f"parameter {key} must be a number")
        if key in POSITIVE and isinstance(value, int) and value < 1:
            raise SchemaError(f"parameter {key} must be at least 1")
        merged[key] = value
    seed = data.get("seed", 0)
    if not isinstance(seed, int):
        raise SchemaError("seed must be an integer")
    output = data.get("output", {})
    stem = output.get("stem", kind) if isinstance(output, dict) else kind
    return {"kind": kind, "seed": seed, "params": merged, "stem": str(stem)}


def scenario_hash(resolved: dict) -> str:
    canonical = json.dumps(resolved, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode()).hexdigest()


def _tolerances() -> dict:
    return as_dict(MeasureConfig(), WeylConfig(), KazhdanConfig(), ReprConfig(), TensorConfig(),
                   ScheduleConfig(), GroupConfig())


def _clean(obj):
    """Make numpy and complex values JSON-friendly; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [_clean(float(obj.real)), _clean(float(obj.imag))]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    return obj


# ---------------------------------------------------------------------------
# scenario runners: each returns (results dict, table rows, extra files)
# ---------------------------------------------------------------------------


def _measure(spec):
    if spec is None:
        raise SchemaError("a measure file or inline measure table is required")
    if isinstance(spec, dict):
        return measure_from_dict(spec)
    try:
        return load_measure(spec)
    except OSError as exc:
        raise IOFailure(f"cannot read measure {spec}: {exc}") from exc


def run_measure_eval(p, seed):
    m = _measure(p["measure"])
    ns = list(range(int(p["n_min"]), int(p["n_max"]) + 1))
    vals = fourier_coefficients(m, ns)
    rows = [["n", "re", "im"]] + [[n, float(v.real), float(v.imag)] for n, v in zip(ns, vals)]
    return {"label": m.label, "total_mass": m.total_mass, "indices": [ns[0], ns[-1]]}, rows, {}


def run_weyl_scan(p, seed):
    from .weyl import IntegerSequence, weyl_criterion_scan

    seq = IntegerSequence.parse(p["seq"])
    theta = CirclePoint.parse(p["theta"])
    reports = weyl_criterion_scan(seq, theta, int(p["harmonics"]), int(p["N"]))
    rows = [["harmonic", "N", "re", "im", "abs"]]
    for r in reports:
        rows += [[r.harmonic, n, s.real, s.imag, abs(s)] for n, s in r.partial]
    results = {"sequence": seq.text, "theta": theta.describe(), "N": int(p["N"]),
               "magnitudes": [r.magnitude for r in reports],
               "note": "finite-N Cesaro means; no equidistribution limit is claimed"}
    return results, rows, {}


def run_kazhdan_witness(p, seed):
    from .kazhdan import bernoulli_verdict, real_line_witness
    from .measures import bernoulli_weights, bernoulli_witness

    eps = float(p["epsilon"])
    if p["set"] == "lacunary:2^k":
        verdict = bernoulli_verdict(eps, int(p["K"]), int(p["depth"]))
        measure = bernoulli_witness(bernoulli_weights(eps, int(p["depth"])), int(p["depth"]))
        extra = {"measure.toml": measure_to_toml(measure)}
    elif p["set"] == "k+sqrt2":
        verdict = real_line_witness(eps, int(p["window"]))
        extra = {}
    else:
        raise SchemaError("kazhdan-witness knows the sets 'lacunary:2^k' and 'k+sqrt2'")
    rows = [["check", "index", "defect", "bound"]]
    for t in verdict.trace:
        rows.append([t["check"], t.get("k", t.get("b", "")), t.get("defect", ""), t.get("bound", "")])
    return {"verdict": verdict.as_dict()}, rows, extra


def run_kazhdan_certify(p, seed):
    from .kazhdan import example_b_certificate

    if p["set"] != "lacunary:2^k+k":
        raise SchemaError("kazhdan-certify checks the set 'lacunary:2^k+k'")
    m = _measure(p["measure"] if p["measure"] is not None else DEFAULT_CERTIFY_MEASURE)
    cfg = KazhdanConfig(atom_window=int(p["N"]))
    verdict = example_b_certificate(m, int(p["K"]), cfg)
    rows = [["k", "lhs", "middle", "rhs", "slack"]]
    rows += [[t["k"], t["lhs"], t["middle"], t["rhs"], t["slack"]] for t in verdict.trace if t["check"] == "chain"]
    return {"verdict": verdict.as_dict()}, rows, {}


def run_rep_project(p, seed):
    from .reps import (
        UnitaryRep,
        cesaro_commutant_average,
        commutant_projection,
        decompose,
        projection_norm,
        random_spectral_unitary,
        read_matrix_csv,
    )

    rng = np.random.default_rng(seed)
    try:
        U = read_matrix_csv(p["matrix"]) if p["matrix"] else random_spectral_unitary(
            rng, int(p["dim"]), float(p["gap"]), int(p["distinct"]))
        d = U.shape[0]
        A = read_matrix_csv(p["operator"]) if p["operator"] else (
            rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    except OSError as exc:
        raise IOFailure(str(exc)) from exc
    rep = UnitaryRep([U])
    decomp = decompose(rep)
    decomp.validate(rep)
    P = commutant_projection(rep, decomp, A)
    results = {
        "dim": d,
        "classes": [{"eigenvalue": c.label[0], "multiplicity": c.multiplicity} for c in decomp.classes],
        "projection_norm": projection_norm(rep, decomp, A),
        "hs_norm": float(np.linalg.norm(P)),
        "commutator": float(np.linalg.norm(U @ P - P @ U)),
        "idempotence": float(np.linalg.norm(commutant_projection(rep, decomp, P) - P)),
        "trace_change": abs(np.trace(P) - np.trace(A)),
    }
    if int(p["cesaro_N"]) > 0:
        results["cesaro_N"] = int(p["cesaro_N"])
        results["cesaro_distance"] = float(np.linalg.norm(P - cesaro_commutant_average(rep, A, int(p["cesaro_N"]))))
    rows = [["row", "col", "re", "im"]]
    rows += [[i, j, P[i, j].real, P[i, j].imag] for i in range(d) for j in range(d)]
    return results, rows, {"decomposition.json": decomp.to_json() + "\n"}


def run_tensor_diagnose(p, seed):
    from .tensor import RepSequence, c0_series, diagonal_slot, load_sequence, prop_4_3_diagnostic

    if p["slots"]:
        try:
            seq = load_sequence(Path(p["slots"]).read_text())
        except OSError as exc:
            raise IOFailure(str(exc)) from exc
    elif p["family"] == "diagonal":
        seq = RepSequence(tuple(diagonal_slot(n) for n in range(1, int(p["levels"]) + 1)))
    else:
        raise SchemaError("tensor-diagnose needs a slots file or family = 'diagonal'")
    diag = prop_4_3_diagnostic(seq, float(p["threshold"]))
    trace = c0_series(seq, [int(p["g"])])
    rows = [["n", "v_n", "c0_partial_sum"]]
    rows += [[n, v, s] for n, (v, s) in enumerate(zip(diag.values, trace.partial), start=1)]
    results = {"window": list(diag.window), "minimum": diag.minimum, "threshold": diag.threshold,
               "criterion_met_at_horizon": diag.criterion_met, "c0_total": float(trace.partial[-1]),
               "c0_divergence_suspected": trace.divergence_suspected,
               "note": "finite window only; no weak-mixing limit is claimed"}
    return results, rows, {}


def _window(spec, kind, sign="+"):
    """Built-in windows live on the whole line (Heisenberg) or on the half-line of ``sign`` (affine)."""
    from .groups import WindowFunction

    s = 1.0 if sign == "+" else -1.0
    lo, hi = (0.0, 8.0) if s > 0 else (-8.0, 0.0)
    if spec == "gaussian":
        return WindowFunction.gaussian() if kind == "heisenberg" else WindowFunction.gaussian(4.0 * s, 0.4, lo=lo, hi=hi)
    if spec == "bump":
        return WindowFunction.bump() if kind == "heisenberg" else WindowFunction.bump(2.0 * s, 1.0, lo=lo, hi=hi)
    try:
        return WindowFunction.from_csv(spec).normalized()
    except OSError as exc:
        raise IOFailure(f"cannot read window {spec}: {exc}") from exc


def run_heisenberg_decay(p, seed):
    from .groups import heisenberg_decay_scan

    u = _window(p["window"], "heisenberg")
    ps = np.linspace(0.0, float(p["pmax"]), int(p["steps"]))
    scan = heisenberg_decay_scan(float(p["lambda"]), u, u, ps, float(p["t"]), float(p["q"]))
    rows = [["p", "magnitude", "envelope"]] + [list(r) for r in zip(ps, scan.magnitudes, scan.envelope)]
    return {"decay_factor": scan.decay_factor, "grid_points": len(u.x),
            "note": "finite scan; the coefficient tends to 0 only as |p| grows without bound"}, rows, {}


def run_affine_decay(p, seed):
    from .groups import affine_decay_scan

    f = _window(p["window"], "affine", p["sign"])
    bs = np.linspace(0.0, float(p["bmax"]), int(p["steps"]))
    scan = affine_decay_scan(p["sign"], f, f, bs, float(p["a"]))
    rows = [["b", "magnitude", "envelope"]] + [list(r) for r in zip(bs, scan.magnitudes, scan.envelope)]
    return {"decay_factor": scan.decay_factor, "grid_points": len(f.x),
            "note": "finite scan; the coefficient tends to 0 only as |b| grows without bound"}, rows, {}


RUNNERS = {
    "measure-eval": run_measure_eval,
    "weyl-scan": run_weyl_scan,
    "kazhdan-witness": run_kazhdan_witness,
    "kazhdan-certify": run_kazhdan_certify,
    "rep-project": run_rep_project,
    "tensor-diagnose": run_tensor_diagnose,
    "heisenberg-decay": run_heisenberg_decay,
    "affine-decay": run_affine_decay,
}


def run(data: dict, out_dir=".", fmt: str = "json", seed: int | None = None) -> list:
    """Run one scenario and write its report; returns the written paths."""
    resolved = resolve(data)
    if seed is not None:
        resolved["seed"] = seed
    digest = scenario_hash(resolved)
    results, rows, extra = RUNNERS[resolved["kind"]](resolved["params"], resolved["seed"])
    header = {
        "tool": "kazhdan_lab",
        "version": __version__,
        "kind": resolved["kind"],
        "seed": resolved["seed"],
        "scenario_sha256": digest,
        "params": resolved["params"],
        "tolerances": _tolerances(),
    }
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        written = []
        stem = resolved["stem"]
        if fmt == "json":
            body = dict(header, results=results, table=rows)
            path = out / f"{stem}.json"
            path.write_text(json.dumps(_clean(body), indent=2, sort_keys=True) + "\n")
        else:
            buf = io.StringIO()
            for key, value in sorted(header.items()):
                buf.write(f"# {key}: {json.dumps(_clean(value), sort_keys=True)}\n")
            buf.write(f"# results: {json.dumps(_clean(results), sort_keys=True)}\n")
            writer = csv.writer(buf, lineterminator="\n")
            for row in rows:
                writer.writerow([repr(v) if isinstance(v, float) else v for v in _clean(row)])
            path = out / f"{stem}.csv"
            path.write_text(buf.getvalue())
        written.append(path)
        for name, text in extra.items():
            extra_path = out / f"{stem}.{name}"
            extra_path.write_text(text)
            written.append(extra_path)
    except OSError as exc:
        raise IOFailure(f"cannot write report: {exc}") from exc
    return written


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _global_flags(parser):
    parser.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    parser.add_argument("--out-dir", default=".", help="directory for reports")
    parser.add_argument("--format", choices=("csv", "json"), default="json")


def _fail(exc: BaseException) -> int:
    if isinstance(exc, KazlabError):
        code = exc.code
    elif isinstance(exc, OSError):
        code = "IO"
    elif isinstance(exc, (ValueError, TypeError, KeyError)):
        code = "SCHEMA"
    else:
        code = "COMPUTATION"
    record = {"error": code, "type": type(exc).__name__, "message": str(exc)}
    print(json.dumps(record, sort_keys=True), file=sys.stderr)
    return EXIT_CODES[code]


def _dispatch(kind: str, params: dict, args) -> int:
    data = {"kind": kind, "params": {k: v for k, v in params.items() if v is not None}}
    if getattr(args, "out", None):
        out = Path(args.out)
        data["output"] = {"stem": out.stem}
        out_dir = str(out.parent) if str(out.parent) != "." else args.out_dir
        fmt = out.suffix.lstrip(".") if out.suffix in (".csv", ".json") else args.format
    else:
        out_dir, fmt = args.out_dir, args.format
    try:
        for path in run(data, out_dir, fmt, args.seed):
            print(path)
    except Exception as exc:  # noqa: BLE001 - every failure becomes an error record
        return _fail(exc)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kazlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a scenario file (TOML or JSON)")
    p_run.add_argument("scenario")
    _global_flags(p_run)
    _add_weyl(sub.add_parser("weyl", help="Weyl scans").add_subparsers(dest="action", required=True))
    _add_kazhdan(sub.add_parser("kazhdan", help="witnesses and certificates").add_subparsers(
        dest="action", required=True))
    _add_heisenberg(sub.add_parser("heisenberg", help="Heisenberg coefficient decay").add_subparsers(
        dest="action", required=True))
    p_aff = sub.add_parser("affine", help="affine coefficient decay").add_subparsers(dest="action", required=True)
    d = p_aff.add_parser("decay")
    d.add_argument("--sign", choices=("+", "-"), default="+")
    d.add_argument("--window", default="bump")
    d.add_argument("--bmax", type=float, default=50.0)
    d.add_argument("--steps", type=int, default=51)
    d.add_argument("--a", type=float, default=1.0)
    d.add_argument("--out")
    _global_flags(d)
    return parser


def _add_weyl(sub):
    s = sub.add_parser("scan")
    s.add_argument("--seq", default="poly:1,0,0")
    s.add_argument("--theta", default="sqrt2")
    s.add_argument("--N", type=int, default=100000)
    s.add_argument("--harmonics", type=int, default=WeylConfig().harmonics)
    s.add_argument("--out")
    _global_flags(s)


def _add_kazhdan(sub):
    w = sub.add_parser("witness")
    w.add_argument("--set", default="lacunary:2^k")
    w.add_argument("--epsilon", type=float, default=0.05)
    w.add_argument("--K", type=int, default=30)
    w.add_argument("--depth", type=int, default=40)
    w.add_argument("--out")
    _global_flags(w)
    c = sub.add_parser("certify")
    c.add_argument("--set", default="lacunary:2^k+k")
    c.add_argument("--measure")
    c.add_argument("--K", type=int, default=20)
    c.add_argument("--N", type=int, default=KazhdanConfig().atom_window)
    c.add_argument("--out")
    _global_flags(c)


def _add_heisenberg(sub):
    d = sub.add_parser("decay")
    d.add_argument("--lambda", dest="lam", type=float, default=1.0)
    d.add_argument("--window", default="gaussian")
    d.add_argument("--pmax", type=float, default=10.0)
    d.add_argument("--steps", type=int, default=11)
    d.add_argument("--out")
    _global_flags(d)


def _execute(args) -> int:
    if args.command == "run":
        try:
            data = load_scenario(args.scenario)
            for path in run(data, args.out_dir, args.format, args.seed):
                print(path)
        except Exception as exc:  # noqa: BLE001
            return _fail(exc)
        return 0
    if args.command == "weyl":
        return _dispatch("weyl-scan", {"seq": args.seq, "theta": args.theta, "N": args.N,
                                       "harmonics": args.harmonics}, args)
    if args.command == "kazhdan" and args.action == "witness":
        return _dispatch("kazhdan-witness", {"set": args.set, "epsilon": args.epsilon, "K": args.K,
                                             "depth": args.depth}, args)
    if args.command == "kazhdan":
        return _dispatch("kazhdan-certify", {"set": args.set, "measure": args.measure, "K": args.K,
                                             "N": args.N}, args)
    if args.command == "heisenberg":
        return _dispatch("heisenberg-decay", {"lambda": args.lam, "window": args.window, "pmax": args.pmax,
                                              "steps": args.steps}, args)
    return _dispatch("affine-decay", {"sign": args.sign, "window": args.window, "bmax": args.bmax,
                                      "steps": args.steps, "a": args.a}, args)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code == 0:
            return 0
        print(json.dumps({"error": "SCHEMA", "type": "ArgumentError", "message": "invalid command line"}),
              file=sys.stderr)
        return EXIT_CODES["SCHEMA"]
    return _execute(args)


def _prefixed(command: str):
    def entry(argv=None) -> int:
        argv = sys.argv[1:] if argv is None else list(argv)
        return main([command, *argv])

    return entry


weyl_main = _prefixed("weyl")
kazhdan_main = _prefixed("kazhdan")
heisenberg_main = _prefixed("heisenberg")


if __name__ == "__main__":
    sys.exit(main())
