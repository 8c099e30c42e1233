import numpy as np
import pytest

import msequiv


def test_fixture_model():
    low = msequiv.msc_low_dim()
    assert low.dimension == 3
    assert low.variables == ["z1", "z2", "z3"]
    assert low.degradation == [0.1, 0.1, 0.1]
    assert low.parameters == {"m": 1.0, "uA": 0.0, "uO": 0.0, "uC": 0.0}


def test_bundled_files_match_fixture(models_dir):
    assert msequiv.load_model(str(models_dir / "msc_low.model")) == msequiv.msc_low_dim()
    assert msequiv.load_sign_matrix(str(models_dir / "msc_SA.mat")) == msequiv.msc_sign_matrix()


def test_rhs_matches_hand_written_field():
    low = msequiv.msc_low_dim()
    z = np.array([3.0, 1.5, 0.5])
    a1 = (0.2 * 9 + 0.5) / (10 + 0.1 * 9 + 0.5 * 2.25 + 0.5 * 0.25)
    assert low.rhs(z)[0] == pytest.approx(a1 - 0.3, rel=1e-14)
    assert low.jacobian(z).shape == (3, 3)


def test_steady_states():
    states = msequiv.steady_states(msequiv.msc_low_dim())
    assert [s["unstable_count"] for s in states] == [0, 0, 0, 1, 1]
    assert states[0]["x"][0] == pytest.approx(11.995, abs=1e-3)


def test_structure():
    modules = msequiv.check_structure(msequiv.msc_sign_matrix(), 3)
    assert modules == [[4, 5, 6], [7, 8, 9], []]
    with pytest.raises(ValueError):
        msequiv.check_structure(msequiv.msc_sign_matrix(), 10)


def test_construct_and_verify():
    low = msequiv.msc_low_dim()
    high, gains = msequiv.construct(low, msequiv.msc_sign_matrix(), msequiv.msc_default_rates(), [1e-3] * 3)
    assert high.dimension == 9
    assert high.constructed
    assert gains[3:] == pytest.approx([1, 1, 2, 1, 1, 1], abs=1e-12)
    report = msequiv.equivalence(low, high, nyquist=False)
    assert report["verdict"] is True
    assert [p["high_unstable"] for p in report["pairs"]] == [0, 0, 0, 1, 1]


def test_negative_gain_is_rejected():
    with pytest.raises(ValueError, match="negative steady-state gain"):
        msequiv.construct(msequiv.msc_low_dim(), msequiv.msc_sign_matrix(), [1.5, 1.5, 1, 1, 1, 1], [1e-3] * 3)


def test_nyquist_winding_counts_unstable_modes():
    low = msequiv.msc_low_dim()
    for s in msequiv.steady_states(low):
        curve = msequiv.nyquist(low, np.array(s["x"]))
        assert curve["unstable_count"] == s["unstable_count"]
        assert len(curve["omega"]) == len(curve["value"])


def test_simulate_and_continue():
    low = msequiv.msc_low_dim()
    t, x = msequiv.simulate(low, np.array([2.2, 5.0, 2.0]), 200.0, samples=11)
    assert len(t) == 11 and x.shape == (11, 3)
    assert x[-1, 1] == pytest.approx(9.9033, abs=1e-3)
    start = np.array(msequiv.steady_states(low)[0]["x"])
    branch = msequiv.continue_branch(low, "uO", 0.0, 6.0, start)
    assert max(branch["folds"]) == pytest.approx(4.2, abs=0.2)


def test_parameter_override_and_json_round_trip():
    low = msequiv.msc_low_dim().with_parameters({"uO": 5.0})
    assert low.parameters["uO"] == 5.0
    assert msequiv.model_from_json(low.to_json()) == low
    assert len(msequiv.steady_states(low)) == 1
