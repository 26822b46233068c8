"""
Unit tests for discrete product sets
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from admm_quant.cases import load_cases
from admm_quant.discrete_sets import (
    Binary,
    DiscreteProductSet,
    ExplicitGrid,
    ScaledLattice,
    enumerate_members,
    is_member,
    iter_member_blocks,
    project,
    soft_indicator,
)
from admm_quant.errors import (
    CardinalityExceededError,
    DimensionMismatchError,
    InvalidSetError,
    NonFiniteInputError,
    UnboundedSetError,
)

# finite coordinate sets small enough that a product of up to 4 stays below 10^4 members
coordinate_sets = st.one_of(
    st.just(Binary()),
    st.builds(
        lambda v, lo, width: ScaledLattice(v, lo * v, (lo + width) * v),
        st.sampled_from([0.25, 0.5, 1.0, 3.0, 8.0]),
        st.integers(-5, 5),
        st.integers(0, 8),
    ),
    st.lists(
        st.floats(-20, 20, allow_nan=False).map(lambda t: round(t, 3)), min_size=1, max_size=8, unique=True
    ).map(lambda vals: ExplicitGrid(tuple(sorted(vals)))),
)


@st.composite
def set_and_point(draw):
    coords = draw(st.lists(coordinate_sets, min_size=1, max_size=4))
    x = draw(
        st.lists(st.floats(-60, 60, allow_nan=False), min_size=len(coords), max_size=len(coords))
    )
    return DiscreteProductSet(coords), np.array(x)


# dyadic members keep midpoints and squared distances exact, so ties are real ties
dyadic_sets = st.one_of(
    st.builds(
        lambda v, lo, width: ScaledLattice(v, lo * v, (lo + width) * v),
        st.sampled_from([0.25, 0.5, 1.0, 2.0, 8.0]),
        st.integers(-5, 5),
        st.integers(1, 6),
    ),
    st.lists(st.integers(-40, 40), min_size=2, max_size=6, unique=True).map(
        lambda ks: ExplicitGrid(tuple(sorted(k / 4.0 for k in ks)))
    ),
)


@st.composite
def set_and_midpoint(draw):
    """Each coordinate sits on a member or halfway between two neighbours"""
    coords = draw(st.lists(dyadic_sets, min_size=1, max_size=4))
    x = []
    for coord in coords:
        members = coord.members()
        i = draw(st.integers(0, len(members) - 2))
        x.append((members[i] + members[i + 1]) / 2.0 if draw(st.booleans()) else members[i])
    return DiscreteProductSet(coords), np.array(x)


class TestProjection:
    """Test cases for projection and the soft indicator"""

    def setup_method(self):
        self.project_cases = load_cases("discrete_sets", "project")
        self.indicator_cases = load_cases("discrete_sets", "soft_indicator")

    @pytest.mark.unit
    def test_worked_examples(self):
        for case in self.project_cases:
            result = project(case.discrete_set, case["x"])
            np.testing.assert_array_equal(result, case.expected, err_msg=case.description)

    @pytest.mark.unit
    def test_soft_indicator_examples(self):
        for case in self.indicator_cases:
            result = soft_indicator(case.discrete_set, case["x"])
            assert result == pytest.approx(case.expected, abs=1e-12), case.description

    @pytest.mark.unit
    def test_projection_is_idempotent_on_members(self):
        lattice = DiscreteProductSet.lattice(5, 0.5, -2.0, 2.0)
        for member in enumerate_members(lattice)[::37]:
            np.testing.assert_array_equal(project(lattice, member), member)
            assert soft_indicator(lattice, member) == 0.0

    @pytest.mark.unit
    def test_errors(self):
        binary = DiscreteProductSet.binary(3)
        with pytest.raises(DimensionMismatchError):
            project(binary, [0.0, 1.0])
        with pytest.raises(NonFiniteInputError):
            project(binary, [0.0, np.nan, 1.0])
        with pytest.raises(NonFiniteInputError):
            soft_indicator(binary, [np.inf, 0.0, 1.0])

    @pytest.mark.unit
    def test_batch_projection_matches_rows(self, rng):
        mixed = DiscreteProductSet([Binary(), ScaledLattice(2.0), ExplicitGrid((0.0, 0.5, 3.0))])
        points = rng.normal(0.0, 3.0, (50, 3))
        batch = mixed.project_batch(points)
        for row, projected in zip(points, batch):
            np.testing.assert_array_equal(project(mixed, row), projected)

    @pytest.mark.property
    @given(set_and_point())
    def test_projection_matches_exhaustive_search(self, data):
        discrete_set, x = data
        members = np.array(enumerate_members(discrete_set))
        nearest = np.min(np.linalg.norm(members - x, axis=1))
        projected = project(discrete_set, x)
        assert is_member(discrete_set, projected)
        assert np.linalg.norm(projected - x) <= nearest + 1e-9
        assert any(np.array_equal(projected, m) for m in members)

    @pytest.mark.property
    @given(set_and_midpoint())
    def test_ties_resolve_to_lexicographically_smallest_minimizer(self, data):
        discrete_set, x = data
        members = np.array(enumerate_members(discrete_set))
        squared = np.sum((members - x) ** 2, axis=1)
        # members are in lexicographic order, so argmin picks the smallest minimizer
        np.testing.assert_array_equal(project(discrete_set, x), members[np.argmin(squared)])

    @pytest.mark.property
    @given(set_and_point())
    def test_soft_indicator_is_distance_to_projection(self, data):
        discrete_set, x = data
        assert soft_indicator(discrete_set, x) == pytest.approx(
            float(np.linalg.norm(project(discrete_set, x) - x)), abs=1e-12
        )


class TestEnumeration:
    """Test cases for member enumeration"""

    def setup_method(self):
        self.cases = load_cases("discrete_sets", "enumerate")

    @pytest.mark.unit
    def test_worked_examples(self):
        for case in self.cases:
            members = [m.tolist() for m in enumerate_members(case.discrete_set)]
            assert members == case.expected, case.description

    @pytest.mark.unit
    def test_blocks_follow_lexicographic_order(self):
        mixed = DiscreteProductSet([ScaledLattice(1.0, -1.0, 1.0), Binary(), ExplicitGrid((0.0, 2.0))])
        listed = np.array(enumerate_members(mixed))
        blocked = np.vstack(list(iter_member_blocks(mixed, block_size=5)))
        np.testing.assert_array_equal(listed, blocked)
        assert len(listed) == mixed.cardinality == 12
        assert len({tuple(m) for m in listed}) == 12

    @pytest.mark.unit
    def test_unbounded_and_oversized_sets_are_rejected(self):
        with pytest.raises(UnboundedSetError):
            enumerate_members(DiscreteProductSet.lattice(2, 1.0))
        with pytest.raises(CardinalityExceededError):
            enumerate_members(DiscreteProductSet.binary(30), limit=10**6)


class TestSetDescriptions:
    """Test cases for set construction, metadata and JSON descriptions"""

    @pytest.mark.unit
    def test_invalid_sets(self):
        with pytest.raises(InvalidSetError):
            ScaledLattice(0.0)
        with pytest.raises(InvalidSetError):
            ScaledLattice(1.0, 0.2, 0.8)
        with pytest.raises(InvalidSetError):
            ExplicitGrid((1.0, 1.0))
        with pytest.raises(InvalidSetError):
            ExplicitGrid(())
        with pytest.raises(InvalidSetError):
            DiscreteProductSet([])
        with pytest.raises(InvalidSetError):
            DiscreteProductSet.from_dict({"coords": [{"kind": "ternary"}]})

    @pytest.mark.unit
    def test_cardinality_and_covering_radius(self):
        assert DiscreteProductSet.binary(4).cardinality == 16
        assert math.isinf(DiscreteProductSet.lattice(2, 8.0).cardinality)
        assert DiscreteProductSet.lattice(4, 8.0).covering_radius() == pytest.approx(8.0)
        assert math.isinf(DiscreteProductSet.binary(2).covering_radius())
        assert math.isinf(DiscreteProductSet.lattice(2, 1.0, a=0.0).covering_radius())

    @pytest.mark.unit
    def test_description_round_trip(self):
        mixed = DiscreteProductSet([Binary(), ScaledLattice(0.5, None, 2.0), ExplicitGrid((-1.0, 4.0))])
        restored = DiscreteProductSet.from_dict(mixed.to_dict())
        assert restored == mixed
        assert hash(restored) == hash(mixed)

    @pytest.mark.unit
    def test_with_bounds_only_boxes_lattices(self):
        mixed = DiscreteProductSet([ScaledLattice(1.0), Binary()])
        boxed = mixed.with_bounds(-3.0, 3.0)
        assert boxed.cardinality == 14
        assert boxed.coords[1] == Binary()

    @pytest.mark.unit
    def test_membership_tolerance(self):
        lattice = DiscreteProductSet.lattice(2, 0.1)
        assert is_member(lattice, [0.3, -0.7])
        assert not is_member(lattice, [0.3, -0.75])
        assert is_member(lattice, [0.3 + 1e-12, 0.0])
