"""Greedy low-influence restrictions and regularizing decision trees.

The potential ``V_a(f) = sum_I f_I^2 (1+a)^{|I|}`` and its normalization
``S_a(f) = V_a(f) / V_0(f)`` drive the greedy step: fixing the most
influential variable to the better sign lowers ``S_a`` by at least
``a * Inf_max``, and ``S_a`` starts at most ``(1+a)^d``, so the number of
steps is bounded.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np

from ptfkit.errors import ZeroPolynomialError
from ptfkit.fourier import (
    BooleanFn,
    MultilinearPoly,
    PartialAssignment,
    l2sq,
    max_influence,
    normalize_coef,
    restrict,
    to_rational,
)


def default_alpha(d):
    """``1/(d-1)`` for d >= 2, and 1 for d <= 1."""
    return Fraction(1, d - 1) if d >= 2 else 1


def v_alpha(p, alpha):
    """Return ``(V_alpha, S_alpha)``; S_alpha is None for the zero polynomial."""
    alpha = to_rational(alpha)
    base = 1 + alpha
    v = normalize_coef(sum((c * c * base ** m.bit_count() for m, c in p.items()), 0))
    v0 = l2sq(p)
    return v, (normalize_coef(Fraction(v) / v0) if v0 else None)


def s_alpha(p, alpha):
    """``V_alpha(p) / V_0(p)``; raises for the zero polynomial."""
    _, s = v_alpha(p, alpha)
    if s is None:
        raise ZeroPolynomialError("S_alpha is undefined for the zero polynomial")
    return s


def greedy_step_bound(d, alpha, delta):
    """``ceil((1+a)^d / (a * delta))`` evaluated exactly."""
    alpha, delta = to_rational(alpha), to_rational(delta)
    return math.ceil(Fraction((1 + alpha) ** d) / (alpha * delta))


def euler_step_bound(d, delta):
    """``ceil(e * d / delta)`` (in floating point)."""
    return math.ceil(math.e * max(d, 1) / float(delta))


@dataclass(frozen=True)
class GreedyStep:
    variable: int
    sign: int
    influence: object
    s_before: object
    s_after: object

    def to_json(self):
        from ptfkit.io import number_to_json

        return {
            "variable": self.variable,
            "sign": self.sign,
            "influence": number_to_json(self.influence),
            "s_before": number_to_json(self.s_before),
            "s_after": number_to_json(self.s_after),
        }


@dataclass(frozen=True)
class RegularizationReport:
    """Trace of one greedy run."""

    assignment: PartialAssignment
    steps: tuple
    final_inf: object
    alpha: object
    delta: object
    degree: int
    n: int

    @property
    def k(self):
        return len(self.steps)

    @property
    def variables(self):
        return [s.variable for s in self.steps]

    @property
    def step_bound(self):
        """``min(n, ceil(e d / delta))``."""
        return min(self.n, euler_step_bound(self.degree, self.delta))

    @property
    def alpha_step_bound(self):
        return greedy_step_bound(self.degree, self.alpha, self.delta)

    def to_json(self):
        from ptfkit.io import number_to_json

        return {
            "assignment": self.assignment.to_json(),
            "steps": [s.to_json() for s in self.steps],
            "k": self.k,
            "final_inf": number_to_json(self.final_inf),
            "alpha": number_to_json(self.alpha),
            "delta": number_to_json(self.delta),
            "degree": self.degree,
            "step_bound": self.step_bound,
            "alpha_step_bound": self.alpha_step_bound,
        }


def _s_or_inf(p, alpha):
    _, s = v_alpha(p, alpha)
    return math.inf if s is None else s


def greedy_restrict(p, delta, alpha=None, compress=True):
    """Fix variables greedily until every influence is at most ``delta``.

    Each step picks the most influential variable (smallest index on ties)
    and the sign giving the smaller ``S_alpha`` of the restriction (+1 on
    ties).  Returns ``(report, restricted polynomial)``; the polynomial is
    over the free variables (renumbered) unless ``compress=False``.
    """
    if p.is_zero():
        raise ZeroPolynomialError("greedy_restrict needs a nonzero polynomial")
    delta = to_rational(delta)
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    d = p.degree
    alpha = default_alpha(d) if alpha is None else to_rational(alpha)
    current = p
    assignment = PartialAssignment()
    steps = []
    while True:
        inf, var = max_influence(current)
        if inf <= delta:
            break
        s_before = s_alpha(current, alpha)
        options = []
        for b in (1, -1):
            r = restrict(current, {var: b}, compress=False)
            options.append((_s_or_inf(r, alpha), b, r))
        # min by S value; +1 listed first so it wins ties
        s_after, b, current = min(options, key=lambda t: t[0])
        assignment = assignment.extend(var, b)
        steps.append(GreedyStep(var, b, inf, s_before, s_after))
    report = RegularizationReport(assignment, tuple(steps), inf, alpha, delta, d, p.n)
    return report, (restrict(p, assignment) if compress else current)


# decision trees


@dataclass(frozen=True)
class Leaf:
    """A leaf: the path's assignment, the restricted polynomial (over the original n) and status."""

    assignment: PartialAssignment
    depth: int
    status: str = "closed"
    poly: MultilinearPoly = None
    inf_max: object = None

    @property
    def measure(self):
        return Fraction(1, 1 << self.depth)

    @property
    def is_open(self):
        return self.status == "open"


@dataclass(frozen=True)
class Node:
    """Internal node querying ``var``; ``minus`` and ``plus`` follow x_var = -1 and +1."""

    var: int
    minus: object
    plus: object


@dataclass
class DecisionTree:
    """A variable-query tree over {-1,1}^n with leaf restrictions."""

    n: int
    root: object
    params: dict = field(default_factory=dict)

    def leaves(self):
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Leaf):
                out.append(node)
            else:
                stack.append(node.plus)
                stack.append(node.minus)
        return out

    @property
    def depth(self):
        return max(leaf.depth for leaf in self.leaves())

    def total_measure(self):
        return sum((leaf.measure for leaf in self.leaves()), Fraction(0))

    def open_mass(self):
        return sum((leaf.measure for leaf in self.leaves() if leaf.is_open), Fraction(0))

    def leaf_of(self, x):
        """The leaf reached by the point ``x`` (a +-1 sequence)."""
        node = self.root
        while not isinstance(node, Leaf):
            node = node.plus if x[node.var - 1] == 1 else node.minus
        return node

    def validate(self):
        """Check that no variable repeats on a path and leaf depths match."""

        def walk(node, seen, depth):
            if isinstance(node, Leaf):
                if node.depth != depth or set(node.assignment) != seen:
                    raise ValueError("leaf assignment does not match its path")
                return
            if node.var in seen or not 1 <= node.var <= self.n:
                raise ValueError(f"variable {node.var} repeats or is out of range")
            walk(node.minus, seen | {node.var}, depth + 1)
            walk(node.plus, seen | {node.var}, depth + 1)

        walk(self.root, frozenset(), 0)
        return True

    def to_json(self):
        from ptfkit.io import number_to_json

        def enc(node):
            if isinstance(node, Leaf):
                out = {"assignment": node.assignment.to_json(), "status": node.status, "depth": node.depth}
                if node.inf_max is not None:
                    out["inf_max"] = number_to_json(node.inf_max)
                return out
            return {"var": node.var, "children": {"-1": enc(node.minus), "1": enc(node.plus)}}

        return {
            "n": self.n,
            "params": {k: number_to_json(v) for k, v in sorted(self.params.items())},
            "open_mass": number_to_json(self.open_mass()),
            "depth": self.depth,
            "root": enc(self.root),
        }

    @classmethod
    def from_json(cls, data, poly=None):
        """Rebuild the tree; leaf polynomials are recomputed when ``poly`` is given."""
        n = int(data["n"])

        def dec(obj, assignment, depth):
            if "var" in obj:
                v = int(obj["var"])
                return Node(
                    v,
                    dec(obj["children"]["-1"], assignment.extend(v, -1), depth + 1),
                    dec(obj["children"]["1"], assignment.extend(v, 1), depth + 1),
                )
            lp = restrict(poly, assignment, compress=False) if poly is not None else None
            return Leaf(assignment, depth, obj.get("status", "closed"), lp)

        return cls(n, dec(data["root"], PartialAssignment(), 0), dict(data.get("params", {})))


def query_tree(n, variables, poly=None):
    """Complete tree querying ``variables`` in order on every path."""

    def grow(idx, assignment):
        if idx == len(variables):
            lp = restrict(poly, assignment, compress=False) if poly is not None else None
            return Leaf(assignment, idx, "closed", lp)
        v = variables[idx]
        return Node(v, grow(idx + 1, assignment.extend(v, -1)), grow(idx + 1, assignment.extend(v, 1)))

    return DecisionTree(n, grow(0, PartialAssignment()))


def random_tree(n, max_depth, rng, stop_prob=0.25):
    """Random tree of depth at most ``max_depth``; each node stops early with ``stop_prob``."""
    rng = np.random.default_rng(rng)

    def grow(assignment, depth):
        if depth >= max_depth or depth >= n or (depth > 0 and rng.random() < stop_prob):
            return Leaf(assignment, depth)
        v = int(rng.choice(assignment.free_variables(n)))
        return Node(v, grow(assignment.extend(v, -1), depth + 1), grow(assignment.extend(v, 1), depth + 1))

    return DecisionTree(n, grow(PartialAssignment(), 0))


def stated_depth(d, delta, eps):
    """``2^{e d / delta} * ln(1/eps)``, the depth bound as usually stated."""
    exponent = math.e * d / float(delta)
    if exponent > 1000:
        return math.inf
    return 2.0 ** exponent * math.log(1 / float(eps))


def proof_depth(d, delta, eps, k):
    """``t * 2^k`` with ``t = ln(1/eps) * 2^{e d / delta}``, the truncation depth in the construction."""
    base = stated_depth(d, delta, eps)
    return math.inf if base == math.inf or k > 1000 else base * 2.0 ** k


def _closed(poly, delta):
    if poly.is_zero():
        return True, 0
    inf, _ = max_influence(poly)
    return inf <= delta, inf


def build_tree(p, delta, eps, depth_budget):
    """Regularizing tree by repeated greedy blocks.

    At an open node the greedy procedure proposes variables ``v_1..v_k``;
    the node is expanded into the complete subtree over them (a branch
    stops early once its restriction already has every influence at most
    ``delta``), and each resulting leaf is treated the same way.  Nodes at
    ``depth_budget`` that are not yet regular stay open.  Leaf polynomials
    keep the original numbering of variables.
    """
    delta = to_rational(delta)
    eps = to_rational(eps)
    if not 0 < delta <= 1 or not 0 < eps < 1:
        raise ValueError("need delta in (0, 1] and eps in (0, 1)")
    if depth_budget < 0:
        raise ValueError("depth_budget must be >= 0")
    depth_budget = min(depth_budget, p.n)
    max_block = [0]

    def grow(assignment, poly, depth):
        ok, inf = _closed(poly, delta)
        if ok:
            return Leaf(assignment, depth, "closed", poly, inf)
        if depth >= depth_budget:
            return Leaf(assignment, depth, "open", poly, inf)
        report, _ = greedy_restrict(poly, delta, compress=False)
        block = report.variables
        max_block[0] = max(max_block[0], len(block))
        return expand(block, 0, assignment, poly, depth)

    def expand(block, idx, assignment, poly, depth):
        if idx == len(block):
            return grow(assignment, poly, depth)
        ok, inf = _closed(poly, delta)
        if ok:
            return Leaf(assignment, depth, "closed", poly, inf)
        if depth >= depth_budget:
            return Leaf(assignment, depth, "open", poly, inf)
        v = block[idx]
        children = []
        for b in (-1, 1):
            r = restrict(poly, {v: b}, compress=False)
            children.append(expand(block, idx + 1, assignment.extend(v, b), r, depth + 1))
        return Node(v, children[0], children[1])

    root = grow(PartialAssignment(), p, 0)
    d = max(p.degree, 1)
    params = {
        "delta": delta,
        "eps": eps,
        "depth_budget": depth_budget,
        "max_block": max_block[0],
        "stated_depth": stated_depth(d, delta, eps),
        "proof_depth": proof_depth(d, delta, eps, max_block[0]),
    }
    return DecisionTree(p.n, root, params)


def budget_sufficient(tree):
    """True when the budget reached the construction's depth (capped at n), so open mass <= eps is guaranteed."""
    need = min(tree.n, tree.params["proof_depth"])
    return tree.params["depth_budget"] >= need


def ptf_influence_audit(p, delta=None, allow_zeros=False):
    """Compare ``Inf_max`` of ``p`` with that of ``sgn p``.

    ``bound_ratio = Inf_max(sgn p) / (d * delta^{1/(8d)})`` where ``delta``
    defaults to ``Inf_max(p)``.
    """
    inf_poly, var_poly = max_influence(p)
    h = BooleanFn.sign_of(p, allow_zeros=allow_zeros)
    inf_sign, var_sign = max_influence(h)
    if delta is None:
        delta = inf_poly
    d = max(p.degree, 1)
    denom = d * float(delta) ** (1.0 / (8 * d)) if float(delta) > 0 else 0.0
    ratio = float(inf_sign) / denom if denom > 0 else (0.0 if inf_sign == 0 else math.inf)
    return {
        "inf_poly": inf_poly,
        "var_poly": var_poly,
        "inf_sign": inf_sign,
        "var_sign": var_sign,
        "delta": delta,
        "degree": p.degree,
        "bound_ratio": ratio,
        "zero_count": h.zero_count,
    }


__all__ = [
    "DecisionTree",
    "GreedyStep",
    "Leaf",
    "Node",
    "RegularizationReport",
    "build_tree",
    "default_alpha",
    "greedy_restrict",
    "ptf_influence_audit",
    "query_tree",
    "random_tree",
    "s_alpha",
    "v_alpha",
]
