import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rpmsolve.domain import Axis, get_configuration
from rpmsolve.errors import ContractViolation
from rpmsolve.perception import NoiseModel, corrupt, symmetric_noise
from rpmsolve.symbols import ComponentSymbol, PanelSymbol

GRID = get_configuration("2x2Grid")
PANEL = PanelSymbol((ComponentSymbol(frozenset({0, 3}), 2, 4, 6),))


def test_zero_noise_is_point_mass():
    (obj,) = corrupt(PANEL, GRID, 0.0)
    np.testing.assert_array_equal(obj.p_object, [1, 0, 0, 1])
    for j in (0, 3):
        assert obj.type[j, 2] == 1.0 and obj.size[j, 4] == 1.0 and obj.color[j, 6] == 1.0


def test_symmetric_formula():
    np.testing.assert_allclose(symmetric_noise(2, 5, 0.1), [0.025, 0.025, 0.9, 0.025, 0.025])
    np.testing.assert_allclose(symmetric_noise(2, 5, 1.0), [0.25, 0.25, 0.0, 0.25, 0.25])


def test_objectiveness():
    (obj,) = corrupt(PANEL, GRID, 0.2)
    np.testing.assert_allclose(obj.p_object, [0.9, 0.1, 0.1, 0.9])


def test_rows_are_distributions():
    (obj,) = corrupt(PANEL, GRID, 0.37)
    obj.validate()


@pytest.mark.parametrize("eps", [-0.1, 1.5])
def test_epsilon_range(eps):
    with pytest.raises(ContractViolation):
        corrupt(PANEL, GRID, eps)


@given(st.integers(2, 12), st.data())
def test_true_mass_non_increasing(k, data):
    top = 1 - 1 / k
    e1 = data.draw(st.floats(0, top))
    e2 = data.draw(st.floats(e1, top))
    assert symmetric_noise(0, k, e2)[0] <= symmetric_noise(0, k, e1)[0]


def test_deterministic_and_jitter_is_seeded():
    a = corrupt(PANEL, GRID, 0.1, seed=3, jitter=0.05)
    b = corrupt(PANEL, GRID, 0.1, seed=3, jitter=0.05)
    c = corrupt(PANEL, GRID, 0.1, seed=4, jitter=0.05)
    np.testing.assert_array_equal(a[0].type, b[0].type)
    assert not np.array_equal(a[0].type, c[0].type)
    np.testing.assert_array_equal(corrupt(PANEL, GRID, 0.1, seed=1)[0].type,
                                  corrupt(PANEL, GRID, 0.1, seed=2)[0].type)


def test_confusion_matrix_noise_file(tmp_path):
    confusion = np.full((5, 5), 0.05) + np.eye(5) * 0.75
    path = tmp_path / "noise.json"
    path.write_text(json.dumps({"objectiveness": 0.0, "type": confusion.tolist(), "size": 0.0, "color": 0.2}))
    model = NoiseModel.load(path)
    (obj,) = corrupt(PANEL, GRID, model)
    np.testing.assert_allclose(obj.type[0], confusion[2])
    assert obj.size[0, 4] == 1.0
    assert obj.color[0, 6] == pytest.approx(0.8)
    np.testing.assert_array_equal(obj.p_object, [1, 0, 0, 1])


def test_bad_confusion_matrix_rejected():
    with pytest.raises(ContractViolation):
        NoiseModel.from_json({"type": [[0.5, 0.5]]})


def test_empty_slots_carry_uniform_attributes():
    (obj,) = corrupt(PANEL, GRID, 0.1)
    np.testing.assert_allclose(obj.attribute(Axis.COLOR)[1], 0.1)
