import numpy as np
import pytest

from covdecomp.errors import CompositeNotPD, InvalidInput, SupportViolation
from covdecomp.model import (
    GroundTruthModel,
    SupportSet,
    build_partition,
    compose,
    default_threshold,
    max_degree,
    support_off,
)

J2 = np.array([[1.0, 0.5], [0.5, 1.0]])
R2 = np.array([[0.0, -0.1], [-0.1, 0.0]])


def test_compose_two_by_two():
    m = compose(J2, R2)
    # inv(J2) = [[4/3, -2/3], [-2/3, 4/3]] by hand; add the residual.
    np.testing.assert_allclose(m.sigma, [[4 / 3, -23 / 30], [-23 / 30, 4 / 3]], atol=1e-15)
    assert m.lambda_star == 0.5
    np.testing.assert_allclose(m.j_composite, np.linalg.inv(m.sigma))


def test_compose_rejects_bad_inputs():
    with pytest.raises(InvalidInput):
        compose(J2, np.eye(2) * 0.1)
    with pytest.raises(CompositeNotPD):
        compose(J2, np.array([[0.0, 2.0], [2.0, 0.0]]))


def test_support_set_canonical_and_io(tmp_path):
    s = SupportSet(4, frozenset({(2, 0), (1, 3)}))
    assert s.edges() == [(0, 2), (1, 3)]
    assert (2, 0) in s and (0, 1) not in s
    assert s.ordered() == {(0, 2), (2, 0), (1, 3), (3, 1)}
    assert list(s.degrees()) == [1, 1, 1, 1]
    s.save(tmp_path / "e.txt")
    assert (tmp_path / "e.txt").read_text() == "1,3\n2,4\n"
    assert SupportSet.load(tmp_path / "e.txt", 4) == s
    with pytest.raises(InvalidInput):
        SupportSet(3, frozenset({(1, 1)}))
    with pytest.raises(InvalidInput):
        SupportSet(3, frozenset({(0, 3)}))


def test_support_off_threshold():
    m = np.array([[5.0, 1e-7, 0.2], [1e-7, 5.0, 0.0], [0.2, 0.0, 5.0]])
    assert default_threshold(m) == pytest.approx(6e-6)
    assert support_off(m).edges() == [(0, 2)]
    assert support_off(m, 0.0).edges() == [(0, 1), (0, 2)]
    assert max_degree(support_off(m, 0.0)) == 2
    assert max_degree(SupportSet(3)) == 0


def test_partition_covers_all_ordered_pairs(default_model):
    part = build_partition(default_model.j_m, default_model.sigma_r)
    p = default_model.p
    assert part.s | part.s_r | part.s_m_complement == {(i, j) for i in range(p) for j in range(p)}
    assert not part.s & part.s_r and not part.s & part.s_m_complement
    assert part.s_m == part.s | part.s_r
    assert all((i, i) in part.s for i in range(p))
    idx = part.index("s_r")
    assert idx.shape == (len(part.s_r), 2)


def test_partition_rejects_residual_off_markov():
    r = np.zeros((3, 3))
    r[0, 2] = r[2, 0] = -0.1
    j = np.array([[1.0, 0.3, 0.0], [0.3, 1.0, 0.3], [0.0, 0.3, 1.0]])
    with pytest.raises(SupportViolation):
        build_partition(j, r)


def test_model_save_load_round_trip(tmp_path, default_model):
    default_model.save(tmp_path / "m")
    loaded = GroundTruthModel.load(tmp_path / "m")
    for name in ("j_m", "sigma_r", "sigma", "mean"):
        assert np.array_equal(getattr(loaded, name), getattr(default_model, name))
    assert loaded.lambda_star == default_model.lambda_star
    assert loaded.meta["seed"] == "0"
