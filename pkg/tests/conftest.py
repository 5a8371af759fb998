import os
import sys
from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from ptfkit import MultilinearPoly  # noqa: E402

settings.register_profile(
    "ptfkit",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("ptfkit")

small_fractions = st.fractions(min_value=-4, max_value=4, max_denominator=6)


@st.composite
def polys(draw, min_n=1, max_n=6, max_degree=3, allow_zero=False):
    """Random rational multilinear polynomials on a few variables."""
    n = draw(st.integers(min_n, max_n))
    d = draw(st.integers(0, min(max_degree, n)))
    masks = st.integers(0, (1 << n) - 1).filter(lambda m: bin(m).count("1") <= d)
    terms = draw(st.dictionaries(masks, small_fractions, max_size=8))
    p = MultilinearPoly(n, terms)
    if not allow_zero and p.is_zero():
        p = MultilinearPoly(n, {0: Fraction(1)})
    return p


@st.composite
def tables(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    bits = draw(st.lists(st.sampled_from([-1, 1]), min_size=1 << n, max_size=1 << n))
    return n, bits
