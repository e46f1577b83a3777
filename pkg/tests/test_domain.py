import itertools

import numpy as np
import pytest

from rpmsolve.domain import (
    CONFIG_NAMES, DEFAULT_DOMAIN, AttributeDomain, Axis, Kind, Rule, catalog_for_axis,
    forward_raw, generative_pool, get_configuration, number_space, rule_forward, rule_holds_row,
    rule_precondition, scalar_space, subset_space, transition_table,
)
from rpmsolve.errors import ContractViolation, PreconditionError

from conftest import oracle_holds

NUM = Axis.NUMBER_POSITION


def arith(axis, sign, position_mode=False):
    return Rule(axis, Kind.ARITHMETIC, sign, position_mode)


class TestRuleHoldsRow:
    def test_arithmetic_plus_on_number(self):
        assert rule_holds_row(arith(NUM, 1), 1, 2, 3)

    def test_constant_on_type(self):
        rule = Rule(Axis.TYPE, Kind.CONSTANT)
        assert rule_holds_row(rule, 2, 2, 2)
        assert not rule_holds_row(rule, 2, 2, 3)

    def test_progression_on_size(self):
        rule = Rule(Axis.SIZE, Kind.PROGRESSION, 1)
        assert rule_holds_row(rule, 0, 1, 2)
        assert not rule_holds_row(rule, 0, 1, 3)

    def test_position_union(self):
        assert rule_holds_row(arith(NUM, 1, True), {0, 1}, {2}, {0, 1, 2})

    def test_distribute_three_needs_triple(self):
        rule = Rule(Axis.COLOR, Kind.DISTRIBUTE_THREE)
        assert rule_holds_row(rule, 5, 1, 9, triple={1, 5, 9})
        assert not rule_holds_row(rule, 5, 5, 9, triple={1, 5, 9})
        with pytest.raises(ContractViolation):
            rule_holds_row(rule, 5, 1, 9)

    def test_domain_mismatch_is_contract_violation(self):
        with pytest.raises(ContractViolation):
            rule_holds_row(arith(NUM, 1, True), 1, 2, 3)
        with pytest.raises(ContractViolation):
            rule_holds_row(Rule(Axis.TYPE, Kind.CONSTANT), {1}, {1}, {1})
        with pytest.raises(ContractViolation):
            rule_holds_row(Rule(Axis.TYPE, Kind.CONSTANT), 7, 7, 7)


class TestPrecondition:
    def test_number_bound(self):
        assert not rule_precondition(arith(NUM, 1), 3, 2, n_slots=4)
        assert rule_precondition(arith(NUM, 1), 1, 2)

    def test_constant_on_color(self):
        rule = Rule(Axis.COLOR, Kind.CONSTANT)
        assert rule_precondition(rule, 7, 7)
        assert not rule_precondition(rule, 7, 6)

    def test_position_difference_needs_strict_subset(self):
        rule = arith(NUM, -1, True)
        assert rule_precondition(rule, {0, 1}, {0})
        assert not rule_precondition(rule, {0}, {0, 1})
        assert not rule_precondition(rule, {0, 1}, {0, 1})


class TestForward:
    def test_examples(self):
        assert rule_forward(arith(NUM, 1), 1, 3) == 4
        assert rule_forward(Rule(Axis.TYPE, Kind.CONSTANT), 4, 4) == 4
        assert rule_forward(Rule(Axis.COLOR, Kind.DISTRIBUTE_THREE), 5, 9, triple={1, 5, 9}) == 1

    def test_violation_raises_instead_of_clamping(self):
        with pytest.raises(PreconditionError):
            rule_forward(arith(NUM, 1), 3, 2, n_slots=4)
        with pytest.raises(PreconditionError):
            rule_forward(Rule(Axis.SIZE, Kind.PROGRESSION, 1), 4, 5)

    def test_position_progression_rotates_row_major(self):
        rule = Rule(NUM, Kind.PROGRESSION, 1, True)
        assert rule_forward(rule, {0}, {1}, n_slots=4) == frozenset({2})
        assert rule_forward(rule, {3}, {0}, n_slots=4) == frozenset({1})

    def test_position_difference_is_strict_nonempty_subset(self):
        rule = arith(NUM, -1, True)
        space = subset_space(4)
        for a in range(1, 16):
            for b in range(1, 16):
                c = forward_raw(rule, a, b, space)
                if c is not None:
                    assert c != 0 and c & ~a == 0 and c != a


def _spaces():
    for n in (1, 4, 9):
        yield NUM, n, number_space(n)
    yield NUM, 4, subset_space(4)
    yield NUM, 1, subset_space(1)
    for axis in (Axis.TYPE, Axis.SIZE, Axis.COLOR):
        yield axis, 1, scalar_space(axis)


@pytest.mark.parametrize("axis,n,space", list(_spaces()))
def test_transition_table_matches_oracle_exhaustively(axis, n, space):
    for rule in catalog_for_axis(axis, n):
        if rule.kind is Kind.DISTRIBUTE_THREE or rule.space(n) != space:
            continue
        rows = set(zip(*(t.tolist() for t in transition_table(rule, space))))
        expect = {
            (i, j, k)
            for i, j, k in itertools.product(range(space.size), repeat=3)
            if oracle_holds(rule, space.value(i), space.value(j), space.value(k), space)
        }
        assert rows == expect, rule.name


def test_transition_table_sample_on_3x3_positions(rng):
    space = subset_space(9)
    for rule in catalog_for_axis(NUM, 9):
        if not rule.position_mode or rule.kind is Kind.DISTRIBUTE_THREE:
            continue
        i1, i2, i3 = transition_table(rule, space)
        table = dict(zip(zip(i1.tolist(), i2.tolist()), i3.tolist()))
        for a, b in rng.integers(0, space.size, size=(2000, 2)):
            c = forward_raw(rule, space.value(a), space.value(b), space)
            assert table.get((int(a), int(b))) == (None if c is None else space.index(c))


class TestCatalog:
    def test_type_has_six_rules(self):
        names = [r.name for r in catalog_for_axis(Axis.TYPE, 1)]
        assert names == ["Constant", "Progression+1", "Progression-1", "Progression+2", "Progression-2",
                         "DistributeThree"]

    def test_size_adds_arithmetic(self):
        kinds = [r.kind for r in catalog_for_axis(Axis.SIZE, 1)]
        assert len(kinds) == 8
        assert kinds.count(Kind.ARITHMETIC) == 2

    def test_center_number_position_reduces_to_constant(self):
        catalog = catalog_for_axis(NUM, get_configuration("Center").components[0])
        assert [r.name for r in catalog] == ["Number:Constant"]

    def test_catalog_rules_are_distinct_and_feasible(self):
        for n in (1, 4, 9):
            seen = set()
            for rule in catalog_for_axis(NUM, n):
                space = rule.space(n)
                if rule.kind is not Kind.DISTRIBUTE_THREE:
                    table = transition_table(rule, space)
                    assert table[0].size > 0
                    key = (rule.position_mode, tuple(np.concatenate(table).tolist()))
                    assert key not in seen
                    seen.add(key)

    def test_custom_domain_shrinks_catalog(self):
        tiny = AttributeDomain(types=("x", "y"), sizes=2, colors=2)
        assert [r.name for r in catalog_for_axis(Axis.TYPE, 1, tiny)] == ["Constant"]
        three = AttributeDomain(types=("x", "y", "z"), sizes=2, colors=2)
        assert [r.name for r in catalog_for_axis(Axis.TYPE, 1, three)] == [
            "Constant", "Progression+1", "Progression-1", "DistributeThree"]

    @pytest.mark.parametrize("config", CONFIG_NAMES)
    def test_generative_pool_is_catalog_subset(self, config):
        for layout in get_configuration(config).components:
            for axis in Axis:
                pool = generative_pool(axis, layout)
                assert pool and set(pool) <= set(catalog_for_axis(axis, layout))


def test_rule_json_and_name_round_trip():
    for n in (1, 4, 9):
        for axis in Axis:
            for rule in catalog_for_axis(axis, n):
                assert Rule.from_json(axis, rule.to_json()) == rule
                assert Rule.from_name(axis, rule.name) == rule


def test_domain_file_round_trip(tmp_path):
    path = tmp_path / "domain.json"
    path.write_text('{"types": ["a", "b", "c"], "sizes": 4, "colors": 3}')
    dom = AttributeDomain.load(path)
    assert dom.cardinality(Axis.TYPE) == 3 and dom.sizes == 4
    assert AttributeDomain.from_json(DEFAULT_DOMAIN.to_json()) == DEFAULT_DOMAIN


def test_unknown_configuration():
    with pytest.raises(ContractViolation):
        get_configuration("4x4Grid")
