import numpy as np
import pytest
from hypothesis import settings

from rpmsolve.domain import AttributeDomain, Kind
from rpmsolve.logspace import NEG_INF
from rpmsolve.scene import ComponentBelief, PanelBelief

ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """Collects (criterion, passed, detail) lines for the terminal summary."""
    return request.config.stash.setdefault(ACCEPTANCE_KEY, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if not lines:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number, passed, detail in sorted(lines):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")


settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

TOY_DOMAIN = AttributeDomain(types=("a", "b", "c", "d"), sizes=5, colors=5)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_log_dist(rng, m, zero_frac=0.0):
    """Random log distribution with roughly ``zero_frac`` exact zeros."""
    p = rng.dirichlet(np.full(m, 0.7))
    if zero_frac:
        keep = rng.random(m) >= zero_frac
        keep[rng.integers(m)] = True
        p = np.where(keep, p, 0.0)
        p /= p.sum()
    with np.errstate(divide="ignore"):
        return np.log(p)


def point_log(m, index):
    out = np.full(m, NEG_INF)
    out[index] = 0.0
    return out


def random_component(rng, n_slots, domain, zero_frac=0.0) -> ComponentBelief:
    """Independent random distributions per field (abduction reads fields separately)."""
    return ComponentBelief(
        position=random_log_dist(rng, (1 << n_slots) - 1, zero_frac),
        number=random_log_dist(rng, n_slots, zero_frac),
        type=random_log_dist(rng, len(domain.types), zero_frac),
        size=random_log_dist(rng, domain.sizes, zero_frac),
        color=random_log_dist(rng, domain.colors, zero_frac),
    )


def random_panels(rng, n_slots, domain, count=8, zero_frac=0.0):
    return [PanelBelief((random_component(rng, n_slots, domain, zero_frac),)) for _ in range(count)]


# ---------------------------------------------------------------------------
# Independent rule semantics used by the brute-force oracles. Values are the
# raw axis values: ints for scalars (offset included), bitmasks for subsets.
# ---------------------------------------------------------------------------


def _rotate_slots(mask, k, n):
    out = 0
    for s in range(n):
        if mask >> s & 1:
            out |= 1 << ((s + k) % n)
    return out


def oracle_holds(rule, a, b, c, space) -> bool:
    """Row predicate for non-DistributeThree rules, written from the rule table."""
    if rule.kind is Kind.CONSTANT:
        return a == b == c
    if space.is_subset:
        n = space.n_slots
        if rule.kind is Kind.PROGRESSION:
            return _rotate_slots(a, rule.param, n) == b and _rotate_slots(b, rule.param, n) == c
        if rule.param > 0:
            return c == a | b
        return (b & a) == b and b != a and c == a & ~b
    lo = space.offset
    if rule.kind is Kind.PROGRESSION:
        return b - a == rule.param and c - b == rule.param
    mag = lambda v: v - lo + 1  # noqa: E731
    if rule.param > 0:
        return mag(c) == mag(a) + mag(b)
    return mag(c) == mag(a) - mag(b)


def relation_tensor(rule, space) -> np.ndarray:
    """R[i, j, k] = whether outcomes (i, j, k) form a valid row."""
    vals = [space.value(i) for i in range(space.size)]
    m = space.size
    R = np.zeros((m, m, m), dtype=bool)
    for i, a in enumerate(vals):
        for j, b in enumerate(vals):
            for k, c in enumerate(vals):
                R[i, j, k] = oracle_holds(rule, a, b, c, space)
    return R
