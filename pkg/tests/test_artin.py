"""Artin coefficient rings: construction checks, towers, sections."""

from __future__ import annotations

from fractions import Fraction

import pytest

from dgdef.artin import (kernel_filtration, make_artin_ring, residue_map,
                         ring_section, small_extension_tower)
from dgdef.errors import NotFiniteDimensional, ResidueNotField


def test_dual_numbers():
    A = make_artin_ring([("eps", 0)], relations=["eps^2"], name="A")
    assert A.labels == ["1", "eps"]
    assert A.nilpotency_index == 2
    assert A.mul_labels("eps", "eps") == {}


def test_rationals_as_trivial_ring():
    A = make_artin_ring([], relations=[], name="Q")
    assert A.dim() == 1
    assert A.nilpotency_index == 1


def test_negative_degree_test_ring():
    A = make_artin_ring([("u", -2)], relations=["u^2"], name="Au")
    assert A.label_degree("u") == -2
    assert A.diff_label("u") == {}


def test_not_finite_dimensional():
    with pytest.raises(NotFiniteDimensional):
        make_artin_ring([("x", 0)], relations=[], word_cap=6)


def test_residue_not_field():
    with pytest.raises(ResidueNotField):
        make_artin_ring([("x", 0)], relations=["x^2 - 1"])


def test_differential_must_preserve_maximal_ideal():
    # du = 1 escapes the maximal ideal: not a local DG coefficient ring
    with pytest.raises(ResidueNotField):
        make_artin_ring([("u", -1)], relations=[], diff={"u": "1"})


def test_tower_of_t_cubed():
    A = make_artin_ring([("t", 0)], relations=["t^3"], name="At")
    tower = small_extension_tower(residue_map(A))
    assert len(tower) == 2
    assert A.str_vec(tower[0].socle) == "t^2"
    assert tower[1].total.str_vec(tower[1].socle) == "t"
    for step in tower:
        assert not step.total.vec_d(step.socle)
        for lab in step.total.labels[1:]:
            assert not step.total.vec_mul({lab: Fraction(1)}, step.socle)


def test_tower_single_small_extension():
    A = make_artin_ring([("eps", 0)], relations=["eps^2"])
    tower = small_extension_tower(residue_map(A))
    assert len(tower) == 1
    assert A.str_vec(tower[0].socle) == "eps"


def test_tower_socle_replacement_rule():
    """For the mixed-degree ring with de = u the first socle element is u."""
    A = make_artin_ring([("u", 0), ("e", -1)],
                        relations=["u^2", "e^2", "u*e"], diff={"e": "u"})
    tower = small_extension_tower(residue_map(A))
    assert len(tower) == 2
    assert A.str_vec(tower[0].socle) == "u"
    assert tower[0].socle_degree == 0
    assert tower[1].socle_degree == -1


def test_tower_length_equals_kernel_dimension():
    A = make_artin_ring([("a", 0), ("b", 0)],
                        relations=["a^3", "b^2", "a*b"], name="Aab")
    f = residue_map(A)
    tower = small_extension_tower(f)
    assert len(tower) == len(f.kernel_vectors()) == A.dim() - 1


def test_ring_section_and_filtration():
    A = make_artin_ring([("t", 0)], relations=["t^3"])
    f = residue_map(A)
    sec = ring_section(f)
    assert sec[None] == {None: Fraction(1)}
    layers, _ = kernel_filtration(f)
    assert len(layers) == 3          # A/J, J/J^2, J^2
    assert sum(len(layer) for layer in layers) == A.dim()
