import numpy as np
import pytest

from rpmsolve.abduction import (
    AxisPosterior, COLUMN_ORDER, abduce, abduce_axis, line_order, select_rule, select_rules,
)
from rpmsolve.domain import Axis, Kind, Rule, catalog_for_axis, get_configuration
from rpmsolve.errors import ContractViolation
from rpmsolve.scene import PanelBelief, point_mass_component
from rpmsolve.symbols import ComponentSymbol

from conftest import TOY_DOMAIN, random_panels
from oracles import joint_score

NUM = Axis.NUMBER_POSITION


def _lines(panels, rule, component=0):
    return [p.components[component].for_rule(rule) for p in panels]


def _check_against_joint(post: AxisPosterior, panels, n_slots, domain):
    oracle = np.array([joint_score(r, _lines(panels, r), r.space(n_slots, domain)) for r in post.rules])
    finite = np.isfinite(oracle)
    np.testing.assert_array_equal(np.isfinite(post.log_scores), finite)
    assert np.all(np.abs(post.log_scores[finite] - oracle[finite]) < 1e-9)
    if finite.any():
        expect = oracle - np.logaddexp.reduce(oracle[finite])
        assert np.all(np.abs(post.log_probs[finite] - expect[finite]) < 1e-9)
        assert np.all(post.log_probs[~finite] == -np.inf)


class TestJointEnumeration:
    @pytest.mark.parametrize("n_slots", [2, 3, 4])
    def test_number_position_axis(self, rng, n_slots):
        catalog = catalog_for_axis(NUM, n_slots)
        for trial in range(3):
            panels = random_panels(rng, n_slots, TOY_DOMAIN, zero_frac=0.3 * (trial % 2))
            rules = [r for r in catalog if r.space(n_slots).size ** 8 <= 4 ** 8]
            post = abduce_axis(rules, panels, NUM)
            _check_against_joint(post, panels, n_slots, TOY_DOMAIN)

    @pytest.mark.parametrize("axis", [Axis.TYPE, Axis.SIZE, Axis.COLOR])
    def test_scalar_axes_toy_domain(self, rng, axis):
        catalog = catalog_for_axis(axis, 1, TOY_DOMAIN)
        for trial in range(2):
            panels = random_panels(rng, 1, TOY_DOMAIN, zero_frac=0.3 * trial)
            _check_against_joint(abduce_axis(catalog, panels, axis), panels, 1, TOY_DOMAIN)

    def test_sharp_beliefs(self, rng):
        """Near point-mass beliefs put most rules at tiny scores; still exact."""
        catalog = catalog_for_axis(NUM, 4)
        rules = [r for r in catalog if not r.position_mode]
        panels = random_panels(rng, 4, TOY_DOMAIN)
        sharp = [PanelBelief((type(p.components[0])(**{
            f: 8 * getattr(p.components[0], f) - np.logaddexp.reduce(8 * getattr(p.components[0], f))
            for f in ("position", "number", "type", "size", "color")}),)) for p in panels]
        _check_against_joint(abduce_axis(rules, sharp, NUM), sharp, 4, TOY_DOMAIN)


def _number_panels(numbers, masks):
    comps = [ComponentSymbol(frozenset(s for s in range(4) if m >> s & 1), 0, 0, 0) for m in masks]
    assert [c.number for c in comps] == numbers
    return [PanelBelief((point_mass_component(c, 4),)) for c in comps]


def test_addition_example_scores_one():
    panels = _number_panels([1, 2, 3, 1, 3, 4, 1, 2],
                            [0b0001, 0b0110, 0b1011, 0b1000, 0b0111, 0b1111, 0b0010, 0b1100])
    post = abduce_axis(catalog_for_axis(NUM, 4), panels, NUM)
    arith = Rule(NUM, Kind.ARITHMETIC, 1)
    assert post.argmax() == arith
    assert post.log_scores[post.rules.index(arith)] == 0.0


def test_posterior_invariants(rng):
    panels = random_panels(rng, 4, TOY_DOMAIN, zero_frac=0.4)
    post = abduce_axis(catalog_for_axis(NUM, 4), panels, NUM)
    assert abs(post.probs.sum() - 1) < 1e-9
    assert np.all(post.probs >= 0)
    zero = post.probs == 0
    assert np.all(post.log_probs[zero] == -np.inf)


def test_inconsistent_beliefs_fall_back_to_uniform():
    values = [0, 1, 3, 4, 4, 4, 0, 0]
    panels = [PanelBelief((point_mass_component(ComponentSymbol(frozenset({0}), v, 0, 0), 1),)) for v in values]
    catalog = catalog_for_axis(Axis.TYPE, 1)
    with pytest.warns(RuntimeWarning, match="inconsistent"):
        post = abduce_axis(catalog, panels, Axis.TYPE)
    np.testing.assert_allclose(post.probs, 1 / len(catalog))
    assert post.warning


def test_contract_violations(rng):
    panels = random_panels(rng, 1, TOY_DOMAIN)
    with pytest.raises(ContractViolation):
        abduce_axis([], panels, Axis.TYPE)
    with pytest.raises(ContractViolation):
        abduce_axis(catalog_for_axis(Axis.SIZE, 1), panels, Axis.TYPE)
    with pytest.raises(ContractViolation):
        abduce_axis(catalog_for_axis(Axis.TYPE, 1), panels[:7], Axis.TYPE)


def test_column_mode_reads_columns(rng):
    panels = random_panels(rng, 1, TOY_DOMAIN)
    col = abduce_axis(catalog_for_axis(Axis.COLOR, 1, TOY_DOMAIN), panels, Axis.COLOR, column_mode=True)
    reordered = [panels[i] for i in COLUMN_ORDER]
    row = abduce_axis(catalog_for_axis(Axis.COLOR, 1, TOY_DOMAIN), reordered, Axis.COLOR)
    np.testing.assert_array_equal(col.log_scores, row.log_scores)
    assert line_order(False) == tuple(range(8))


def _posterior(probs):
    rules = catalog_for_axis(Axis.SIZE, 1)[:len(probs)]
    with np.errstate(divide="ignore"):
        logp = np.log(np.asarray(probs, dtype=float))
    return AxisPosterior(Axis.SIZE, rules, logp, logp, [], None)


class TestSelection:
    def test_argmax(self):
        post = _posterior([0.7, 0.2, 0.1])
        assert select_rule(post) == post.rules[0]

    def test_argmax_ties_lowest_index(self):
        post = _posterior([0.4, 0.4, 0.2])
        assert select_rule(post) == post.rules[0]

    def test_one_hot_sample(self):
        post = _posterior([0.0, 1.0, 0.0])
        assert all(select_rule(post, "sample", s) == post.rules[1] for s in range(50))

    def test_uniform_sample_frequencies(self):
        post = _posterior([0.25] * 4)
        rng = np.random.default_rng(0)
        draws = [post.rules.index(select_rule(post, "sample", rng)) for _ in range(10_000)]
        freq = np.bincount(draws, minlength=4) / 10_000
        assert np.all(np.abs(freq - 0.25) < 0.02)

    def test_unknown_mode(self):
        with pytest.raises(ContractViolation):
            select_rule(_posterior([1.0]), "greedy")


def test_full_abduce_and_json(rng):
    config = get_configuration("O-IG")
    panels = [PanelBelief((p.components[0], q.components[0]))
              for p, q in zip(random_panels(rng, 1, TOY_DOMAIN), random_panels(rng, 4, TOY_DOMAIN))]
    post = abduce(panels, config)
    assert len(post.components) == 2
    dump = post.to_json()
    assert set(dump[1]) == {"NumberPosition", "Type", "Size", "Color"}
    for comp in dump:
        for axis_probs in comp.values():
            assert abs(sum(axis_probs.values()) - 1) < 1e-9
    assert len(select_rules(post, "sample", 3)) == 2


def test_position_rules_on_2x2_match_row_enumeration(rng):
    """15^8 joint states is too many; the joint sum factors over independent panels."""
    from conftest import relation_tensor

    catalog = [r for r in catalog_for_axis(NUM, 4) if r.position_mode and r.kind is not Kind.DISTRIBUTE_THREE]
    panels = random_panels(rng, 4, TOY_DOMAIN, zero_frac=0.2)
    post = abduce_axis(catalog, panels, NUM)
    for rule, got in zip(catalog, post.log_scores):
        p = np.exp(np.array(_lines(panels, rule)))
        R = relation_tensor(rule, rule.space(4))
        total = (np.einsum("ijk,i,j,k->", R, p[0], p[1], p[2])
                 * np.einsum("ijk,i,j,k->", R, p[3], p[4], p[5])
                 * np.einsum("ij,i,j->", R.any(axis=2), p[6], p[7]))
        if total == 0:
            assert got == -np.inf
        else:
            assert abs(got - np.log(total)) < 1e-9, rule.name
