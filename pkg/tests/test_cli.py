import json

import pytest

from kazhdan_lab import __version__
from kazhdan_lab.cli import EXIT_CODES, main, resolve, scenario_hash

SCENARIOS = {
    "measure-eval": {"measure": {"atoms": {"points": ["1/2"], "masses": [1.0]}}, "n_max": 3},
    "weyl-scan": {"N": 500, "harmonics": 2},
    "kazhdan-witness": {"epsilon": 0.1, "depth": 20, "K": 10},
    "kazhdan-certify": {"K": 6, "N": 200},
    "rep-project": {"dim": 4, "distinct": 2, "cesaro_N": 100},
    "tensor-diagnose": {"levels": 6},
    "heisenberg-decay": {"pmax": 4.0, "steps": 3},
    "affine-decay": {"bmax": 10.0, "steps": 3},
}


def write_scenario(path, kind, params, seed=3):
    path.write_text(json.dumps({"kind": kind, "seed": seed, "params": params}))
    return path


@pytest.mark.parametrize("kind", sorted(SCENARIOS))
@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_scenarios_are_deterministic(tmp_path, kind, fmt):
    scen = write_scenario(tmp_path / "s.json", kind, SCENARIOS[kind])
    outs = []
    for run in ("a", "b"):
        assert main(["run", str(scen), "--out-dir", str(tmp_path / run), "--format", fmt]) == 0
        outs.append({p.name: p.read_bytes() for p in (tmp_path / run).iterdir()})
    assert outs[0] == outs[1]
    report = outs[0][f"{kind}.{fmt}"].decode()
    assert __version__ in report and "scenario_sha256" in report


def test_json_report_contents(tmp_path):
    scen = write_scenario(tmp_path / "s.json", "kazhdan-certify", SCENARIOS["kazhdan-certify"])
    main(["run", str(scen), "--out-dir", str(tmp_path)])
    report = json.loads((tmp_path / "kazhdan-certify.json").read_text())
    assert report["results"]["verdict"]["kind"] == "atom_certificate"
    assert report["tolerances"]["KazhdanConfig"]["example_b_threshold"] == pytest.approx(1 / 18)
    resolved = resolve({"kind": "kazhdan-certify", "seed": 3, "params": SCENARIOS["kazhdan-certify"]})
    assert report["scenario_sha256"] == scenario_hash(resolved)


def test_seed_changes_hash():
    a = resolve({"kind": "rep-project", "seed": 1})
    b = resolve({"kind": "rep-project", "seed": 2})
    assert scenario_hash(a) != scenario_hash(b)


def test_toml_scenario_with_relative_measure(tmp_path):
    (tmp_path / "m.toml").write_text('[density]\nkind = "lebesgue"\n')
    (tmp_path / "s.toml").write_text('kind = "measure-eval"\n[params]\nmeasure = "m.toml"\nn_max = 2\n')
    assert main(["run", str(tmp_path / "s.toml"), "--out-dir", str(tmp_path / "o"), "--format", "csv"]) == 0
    rows = [r for r in (tmp_path / "o" / "measure-eval.csv").read_text().splitlines() if not r.startswith("#")]
    assert rows[0] == "n,re,im" and rows[-1] == "2,0.0,0.0"


def test_subcommands(tmp_path, capsys):
    assert main(["weyl", "scan", "--N", "100", "--harmonics", "1", "--out", str(tmp_path / "w.csv")]) == 0
    assert main(["kazhdan", "witness", "--epsilon", "0.2", "--depth", "10", "--K", "5",
                 "--out", str(tmp_path / "k.json")]) == 0
    assert (tmp_path / "k.measure.toml").exists()
    assert main(["heisenberg", "decay", "--steps", "2", "--out", str(tmp_path / "h.json")]) == 0
    assert main(["affine", "decay", "--sign=-", "--steps", "2", "--out", str(tmp_path / "a.json")]) == 0
    assert json.loads((tmp_path / "h.json").read_text())["results"]["decay_factor"] > 1


@pytest.mark.parametrize(
    "argv,code",
    [
        (["weyl", "scan", "--N", "0"], "SCHEMA"),
        (["weyl", "scan", "--seq", "fib"], "SCHEMA"),
        (["kazhdan", "witness", "--set", "primes"], "SCHEMA"),
        (["kazhdan", "certify", "--measure", "/nonexistent/m.toml"], "IO"),
        (["heisenberg", "decay", "--lambda", "0"], "SCHEMA"),
        (["run", "/nonexistent/s.toml"], "IO"),
        (["nonsense"], "SCHEMA"),
    ],
)
def test_error_codes(tmp_path, capsys, argv, code):
    rc = main(argv + (["--out-dir", str(tmp_path)] if argv[0] != "nonsense" else []))
    assert rc == EXIT_CODES[code]
    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert record["error"] == code


def test_non_probability_measure(tmp_path, capsys):
    scen = write_scenario(tmp_path / "s.json", "kazhdan-certify",
                          {"measure": {"atoms": {"points": ["0"], "masses": [2.0]}}, "K": 4})
    rc = main(["run", str(scen), "--out-dir", str(tmp_path)])
    assert rc == EXIT_CODES["COMPUTATION"]
    assert json.loads(capsys.readouterr().err)["type"] == "NotProbabilityError"


def test_unknown_parameter(tmp_path, capsys):
    scen = write_scenario(tmp_path / "s.json", "weyl-scan", {"bogus": 1})
    assert main(["run", str(scen), "--out-dir", str(tmp_path)]) == EXIT_CODES["SCHEMA"]


def test_consistency_exit_code(tmp_path, capsys, monkeypatch):
    from kazhdan_lab import kazhdan
    from kazhdan_lab.errors import ConsistencyError

    def broken(*args, **kwargs):
        raise ConsistencyError("chain inequality violated")

    monkeypatch.setattr(kazhdan, "example_b_certificate", broken)
    assert main(["kazhdan", "certify", "--out-dir", str(tmp_path)]) == EXIT_CODES["CONSISTENCY"]
    assert json.loads(capsys.readouterr().err)["error"] == "CONSISTENCY"
