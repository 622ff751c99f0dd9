import numpy as np
import pytest

from kazhdan_lab.errors import SchemaError
from kazhdan_lab.measure_io import load_measure, measure_from_dict, measure_to_toml, tomllib, write_coefficients_csv
from kazhdan_lab.measures import fourier_coefficients

NS = list(range(-40, 41))


@pytest.mark.parametrize(
    "data",
    [
        {"label": "mix", "atoms": {"points": ["0", "1/2"], "masses": [0.5, 0.25]},
         "density": {"kind": "lebesgue", "weight": 0.25}},
        {"density": {"kind": "poisson", "r": 0.3, "grid": 1024}},
        {"riesz": {"sequence": "lacunary:3^k+k", "depth": 5, "grid": 4096}},
        {"atoms": {"points": ["1/3"], "masses": [0.5]}, "bernoulli": {"epsilon": 0.1, "depth": 12, "weight": 0.5}},
        {"density": {"kind": "samples", "values": [1.0, 2.0, 0.5, 0.5], "weight": 0.5}},
    ],
)
def test_round_trip(data):
    m = measure_from_dict(data)
    back = measure_from_dict(tomllib.loads(measure_to_toml(m)))
    np.testing.assert_allclose(fourier_coefficients(back, NS[38:43]), fourier_coefficients(m, NS[38:43]), atol=1e-15)
    assert abs(m.total_mass - back.total_mass) < 1e-15


def test_file_and_csv(tmp_path):
    path = tmp_path / "m.toml"
    path.write_text('[atoms]\npoints = ["1/4"]\nmasses = [[0.0, 1.0]]\n')
    m = load_measure(path)
    assert m.total_mass == 1j
    write_coefficients_csv(tmp_path / "c.csv", m, [0, 1])
    assert (tmp_path / "c.csv").read_text().splitlines()[2] == "1,-1.0,6.123233995736766e-17"


@pytest.mark.parametrize(
    "data",
    [
        {"bogus": 1},
        {"domain": "R"},
        {"atoms": {"points": ["0"], "masses": []}},
        {"density": {"kind": "cantor"}},
        {"riesz": {"frequencies": [3, 9]}},
        {"riesz": {"frequencies": [3, 9], "depth": 2}, "density": {"kind": "lebesgue"}},
    ],
)
def test_schema_errors(data):
    with pytest.raises(SchemaError):
        measure_from_dict(data)


def test_bad_toml(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("[atoms\n")
    with pytest.raises(SchemaError):
        load_measure(path)
