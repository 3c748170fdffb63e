import math

import xylocc


def test_version_string():
    assert isinstance(xylocc.__version__, str)
    assert len(xylocc.__version__.split(".")) == 3


def test_ground_state_is_normalized():
    gs = xylocc.ground_state(8, 1.0, 0.5)
    assert gs["parity"] in ("even", "odd")
    assert gs["energy"] < 0
    assert gs["gap"] >= 0
    vec = gs["vector"]
    assert len(vec) == 2**8
    assert math.isclose(sum(v * v for v in vec), 1.0, abs_tol=1e-12)


def test_spectrum_is_a_distribution():
    spec = xylocc.entanglement_spectrum(8, 1.0, 1.0, 4)
    assert all(x >= 0.0 for x in spec)
    assert all(a >= b for a, b in zip(spec, spec[1:]))
    assert math.isclose(sum(spec), 1.0, abs_tol=1e-10)


def test_renyi_of_a_uniform_pair_is_one_bit():
    for alpha in (0.5, 1.0, 2.0, 10.0):
        assert math.isclose(xylocc.renyi_entropy([0.5, 0.5], alpha), 1.0,
                            abs_tol=1e-12)


def test_derivative_sign_matches_value():
    res = xylocc.ds_dg(8, 1.0, 1.4, 4, 2.0)
    assert res["sign"] in ("positive", "negative", "zero")
    if res["value"] > 0:
        assert res["sign"] == "positive"
    if res["value"] < 0:
        assert res["sign"] == "negative"


def test_verdicts_deep_in_each_phase():
    assert xylocc.verdict(8, 1.0, 1.8, 4) == "convertible_increasing"
    assert xylocc.verdict(8, 1.0, 0.4, 4) == "non_convertible"


def test_fermion_route_agrees_with_diagonalization():
    ed = xylocc.entanglement_spectrum(10, 1.0, 1.4, 5)
    ff = xylocc.fermion_block_spectrum(10, 1.0, 1.4, 5)
    common = min(len(ed), len(ff))
    assert common > 0
    for a, b in zip(ed[:common], ff[:common]):
        assert abs(a - b) < 1e-10


def test_fit_recovers_synthetic_decay():
    a, b, c = 0.5, 3.0, 1.0
    points = [(n, a * math.exp(-n / b) + c) for n in (8, 10, 12, 14, 16)]
    fit = xylocc.fit_exponential(points)
    assert math.isclose(fit["a"], a, rel_tol=1e-6)
    assert math.isclose(fit["b"], b, rel_tol=1e-6)
    assert math.isclose(fit["c"], c, rel_tol=1e-6)
    assert fit["rms_residual"] < 1e-10


def test_schedule_map_endpoints():
    assert xylocc.aqc_schedule_to_g(1.0) == 0.0
    assert xylocc.aqc_schedule_to_g(0.5) == 2.0
    assert xylocc.aqc_schedule_to_g(0.4) > xylocc.aqc_schedule_to_g(0.6)


def test_alpha_grid_shape():
    grid = xylocc.default_alpha_grid()
    assert grid == sorted(grid)
    assert grid[0] == 1e-6
    assert grid[-1] == 1e6
    assert len(grid) == 62
