import numpy as np
import pytest

from fracfde.errors import DomainError
from fracfde.mesh import GradedMesh, GridFunction, default_grading, grid_sub
from fracfde.psi import BUILTIN_PSI, PsiMap, get_psi, validate_psi


class TestGradedMesh:
    def test_endpoints_exact(self):
        mesh = GradedMesh(0.25, 2.0, 100, 3.0)
        assert mesh.nodes[0] == 0.25
        assert mesh.nodes[-1] == 2.0

    def test_strictly_increasing(self):
        mesh = GradedMesh(0.0, 1.0, 257, 4.0)
        assert np.all(np.diff(mesh.nodes) > 0)

    def test_uniform_case(self):
        mesh = GradedMesh(0.0, 1.0, 5, 1.0)
        np.testing.assert_allclose(mesh.nodes, [0, 0.25, 0.5, 0.75, 1.0])

    def test_grading_concentrates_left(self):
        uni = GradedMesh(0.0, 1.0, 64, 1.0)
        gra = GradedMesh(0.0, 1.0, 64, 3.0)
        assert gra.nodes[1] < uni.nodes[1]

    def test_index_of(self):
        mesh = GradedMesh(0.0, 1.0, 33, 2.0)
        assert mesh.index_of(mesh.nodes[7]) == 7
        with pytest.raises(DomainError):
            mesh.index_of(-0.5)
        with pytest.raises(DomainError):
            mesh.index_of(0.51234)

    @pytest.mark.parametrize("bad", [(1.0, 0.0), (0.0, 0.0)])
    def test_bad_interval(self, bad):
        with pytest.raises(DomainError):
            GradedMesh(bad[0], bad[1], 10, 1.0)

    def test_bad_grading(self):
        with pytest.raises(DomainError):
            GradedMesh(0.0, 1.0, 10, 0.5)


def test_default_grading():
    assert default_grading(1.0) == 1.0
    assert default_grading(0.75) == pytest.approx(2.0 / 0.75)
    assert default_grading(0.3) == 4.0  # capped


class TestGridFunction:
    def test_raw_roundtrip(self):
        mesh = GradedMesh(0.0, 1.0, 16, 1.0)
        x = GridFunction(mesh, np.arange(16.0))
        assert x.weight_exponent == 0.0
        assert not x.is_weighted

    def test_rejects_nonfinite(self):
        mesh = GradedMesh(0.0, 1.0, 4, 1.0)
        with pytest.raises(DomainError):
            GridFunction(mesh, [1.0, np.inf, 0.0, 0.0])

    def test_rejects_bad_weight(self):
        mesh = GradedMesh(0.0, 1.0, 4, 1.0)
        with pytest.raises(DomainError):
            GridFunction(mesh, np.zeros(4), 1.0)

    def test_rejects_shape_mismatch(self):
        mesh = GradedMesh(0.0, 1.0, 4, 1.0)
        with pytest.raises(DomainError):
            GridFunction(mesh, np.zeros(5))

    def test_immutable_values(self):
        mesh = GradedMesh(0.0, 1.0, 4, 1.0)
        x = GridFunction(mesh, np.zeros(4))
        with pytest.raises(ValueError):
            x.values[0] = 1.0

    def test_grid_sub_requires_same_representation(self):
        mesh = GradedMesh(0.0, 1.0, 8, 1.0)
        x = GridFunction(mesh, np.ones(8), 0.5)
        y = GridFunction(mesh, np.ones(8), 0.0)
        with pytest.raises(DomainError):
            grid_sub(x, y)
        z = grid_sub(x, GridFunction(mesh, np.full(8, 0.25), 0.5))
        np.testing.assert_allclose(z.values, 0.75)


class TestPsiMaps:
    def test_builtins_validate(self, psi_label):
        mesh = GradedMesh(0.0, 1.0, 128, 2.0)
        validate_psi(BUILTIN_PSI[psi_label], mesh.nodes)

    def test_power2_allows_zero_derivative_at_left(self):
        # increasing on the half-open interval; derivative vanishes at 0
        mesh = GradedMesh(0.0, 1.0, 64, 1.0)
        validate_psi(get_psi("power2"), mesh.nodes)

    def test_decreasing_rejected(self):
        bad = PsiMap(lambda t: -np.asarray(t, float), lambda t: -np.ones_like(np.asarray(t, float)), "neg")
        with pytest.raises(DomainError):
            validate_psi(bad, GradedMesh(0.0, 1.0, 16, 1.0).nodes)

    def test_inconsistent_derivative_rejected(self):
        bad = PsiMap(
            lambda t: np.asarray(t, float) ** 2,
            lambda t: 3.0 * np.asarray(t, float),
            "bad-prime",
        )
        with pytest.raises(DomainError):
            validate_psi(bad, GradedMesh(0.1, 1.0, 64, 1.0).nodes)

    def test_unknown_label(self):
        with pytest.raises(DomainError):
            get_psi("sqrt")
