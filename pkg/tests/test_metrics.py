import numpy as np
import pytest

from covdecomp.errors import CompositeNotPD, DimMismatch
from covdecomp.metrics import composite_precision, consistency, edit_distance, linf_error
from covdecomp.model import SupportSet


def test_edit_distance():
    a = SupportSet(4, frozenset({(0, 1), (1, 2)}))
    b = SupportSet(4, frozenset({(0, 1), (2, 3)}))
    assert edit_distance(a, a) == 0
    assert edit_distance(a, b) == 2
    assert edit_distance(SupportSet(4), b) == 2
    with pytest.raises(DimMismatch):
        edit_distance(a, SupportSet(5))


def test_linf_error():
    assert linf_error(np.eye(2), np.eye(2)) == 0.0
    assert linf_error(np.eye(2), np.eye(2) + np.diag([0.1, 0.0])) == pytest.approx(0.1)
    with pytest.raises(DimMismatch):
        linf_error(np.eye(2), np.eye(3))


def test_consistency():
    truth = np.array([[1.0, 0.5, 0.0], [0.5, 1.0, -0.3], [0.0, -0.3, 1.0]])
    assert consistency(truth, truth) == (True, True, 0, 0.0) or consistency(truth, truth).sparsistent
    v = consistency(truth, truth)
    assert (v.sparsistent, v.sign_consistent, v.support_errors, v.linf_error) == (True, True, 0, 0.0)
    flipped = truth.copy()
    flipped[0, 1] = flipped[1, 0] = -0.5
    v = consistency(flipped, truth)
    assert v.sparsistent and not v.sign_consistent and v.linf_error > 0
    dropped = truth.copy()
    dropped[1, 2] = dropped[2, 1] = 1e-9
    v = consistency(dropped, truth)
    assert not v.sparsistent and not v.sign_consistent and v.support_errors == 1


def test_composite_precision():
    j = np.array([[1.0, 0.5], [0.5, 1.0]])
    r = np.array([[0.0, -0.1], [-0.1, 0.0]])
    np.testing.assert_allclose(composite_precision(j, np.zeros((2, 2))), j)
    out = composite_precision(j, r)
    det = 16 / 9 - (23 / 30) ** 2
    np.testing.assert_allclose(out, np.array([[4 / 3, 23 / 30], [23 / 30, 4 / 3]]) / det)
    np.testing.assert_allclose(composite_precision(np.eye(3), np.zeros((3, 3))), np.eye(3))
    with pytest.raises(CompositeNotPD):
        composite_precision(j, np.array([[0.0, 3.0], [3.0, 0.0]]))
