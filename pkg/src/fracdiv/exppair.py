"""Exact exponent-pair arithmetic.

Pairs are held as ``fractions.Fraction`` so every result is in lowest terms.
The van der Corput processes are

    A(k, l) = (k / (2k + 2), (k + l + 1) / (2k + 2))
    B(k, l) = (l - 1/2, k + 1/2)

and a word such as ``"BAAAAA"`` is read right to left: A five times, then B.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

_HALF = Fraction(1, 2)


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` or an integer string.  Decimal strings are refused."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    s = str(text).strip()
    if not s or "." in s or "e" in s.lower():
        raise ValueError(f"expected an exact rational 'p/q', got {text!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"expected an exact rational 'p/q', got {text!r}") from None


def fmt(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


class InadmissiblePair(ValueError):
    pass


@dataclass(frozen=True)
class ExponentPair:
    """(kappa, lambda) with 0 <= kappa <= 1/2 <= lambda <= 1 and kappa + lambda <= 1."""

    kappa: Fraction
    lam: Fraction

    def __post_init__(self):
        object.__setattr__(self, "kappa", Fraction(self.kappa))
        object.__setattr__(self, "lam", Fraction(self.lam))
        bad = admissibility_problem(self.kappa, self.lam)
        if bad:
            raise InadmissiblePair(f"({fmt(self.kappa)}, {fmt(self.lam)}) is not admissible: {bad}")

    @classmethod
    def parse(cls, kappa, lam) -> "ExponentPair":
        return cls(parse_rational(kappa), parse_rational(lam))

    def __iter__(self):
        return iter((self.kappa, self.lam))

    def __str__(self):
        return f"({fmt(self.kappa)}, {fmt(self.lam)})"


def admissibility_problem(kappa: Fraction, lam: Fraction) -> str | None:
    if kappa < 0:
        return "kappa < 0"
    if kappa > _HALF:
        return "kappa > 1/2"
    if lam < _HALF:
        return "lambda < 1/2"
    if lam > 1:
        return "lambda > 1"
    if kappa + lam > 1:
        return "kappa + lambda > 1"
    return None


HALF_HALF = ExponentPair(_HALF, _HALF)
TRIVIAL = ExponentPair(Fraction(0), Fraction(1))
BOMBIERI_IWANIEC = ExponentPair(Fraction(13, 84), Fraction(55, 84))


def a_process(pair: ExponentPair) -> ExponentPair:
    k, l = pair
    den = 2 * k + 2
    return ExponentPair(k / den, (k + l + 1) / den)


def b_process(pair: ExponentPair) -> ExponentPair:
    k, l = pair
    nk, nl = l - _HALF, k + _HALF
    bad = admissibility_problem(nk, nl)
    if bad:
        raise InadmissiblePair(f"B{pair} = ({fmt(nk)}, {fmt(nl)}) leaves the admissible region: {bad}")
    return ExponentPair(nk, nl)


_PROCESSES = {"A": a_process, "B": b_process}


def apply_word(word: str, pair: ExponentPair) -> ExponentPair:
    """Apply a word over {A, B}, rightmost letter first."""
    word = word.strip().upper()
    if not word:
        raise ValueError("empty process word")
    if set(word) - set(_PROCESSES):
        raise ValueError(f"word {word!r} may only contain A and B")
    cur = pair
    for i in range(len(word) - 1, -1, -1):
        try:
            cur = _PROCESSES[word[i]](cur)
        except InadmissiblePair as exc:
            raise InadmissiblePair(f"prefix {word[i:]!r} of {word!r}: {exc}") from None
    return cur


def theta(pair: ExponentPair) -> Fraction:
    """Error exponent (2k + l + 3) / (4k + l + 7) attached to a pair."""
    k, l = pair
    return (2 * k + l + 3) / (4 * k + l + 7)


def lwy_theta(k: int) -> Fraction:
    """Earlier reference exponent (5k - 1) / (10k - 1) for tau_k."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    return Fraction(5 * k - 1, 10 * k - 1)


@dataclass(frozen=True)
class SearchResult:
    word: str
    seed: ExponentPair
    pair: ExponentPair
    theta: Fraction
    explored: int


def search_theta(max_word_len: int, seeds) -> SearchResult:
    """Exhaustive search over words of length <= max_word_len.

    Words are grown by prepending a letter (i.e. applying one more process),
    so each level costs one process application per surviving word.
    Inadmissible branches are dropped.  Ties go to the shortest word, then
    lexicographic order, then the earlier seed.
    """
    if max_word_len < 0:
        raise ValueError("max_word_len must be >= 0")
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one seed pair")
    best = None
    explored = 0
    for si, seed in enumerate(seeds):
        level = [("", seed)]
        for length in range(max_word_len + 1):
            for word, pair in level:
                explored += 1
                key = (theta(pair), len(word), word, si)
                if best is None or key < best[0]:
                    best = (key, word, seed, pair)
            if length == max_word_len:
                break
            nxt = []
            for word, pair in level:
                for letter in "AB":
                    try:
                        nxt.append((letter + word, _PROCESSES[letter](pair)))
                    except InadmissiblePair:
                        continue
            level = nxt
    (th, _, _, _), word, seed, pair = best
    return SearchResult(word, seed, pair, th, explored)


# ---------------------------------------------------------------------------
# Cases I-III exponent ledger at (kappa, lambda) = (1/2, 1/2)


@dataclass(frozen=True)
class Affine:
    """slope * nu_D + offset, with a label naming the bound term it encodes."""

    slope: Fraction
    offset: Fraction
    label: str

    def __call__(self, v: Fraction) -> Fraction:
        return self.slope * v + self.offset

    def __str__(self):
        return f"{fmt(self.slope)}*nu_D + {fmt(self.offset)}"


@dataclass(frozen=True)
class CaseEntry:
    label: str
    constraint: str
    terms: tuple[Affine, ...]
    nu_range: tuple[Fraction, Fraction] | None
    maximum: Fraction | None
    argmax: Fraction | None


@dataclass(frozen=True)
class LedgerReport:
    nu_N: Fraction
    cases: tuple[CaseEntry, ...]
    overall: Fraction
    h_exponent: Affine
    h_threshold: Fraction
    h_feasible: bool

    def case(self, label: str) -> CaseEntry:
        for c in self.cases:
            if c.label == label:
                return c
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {
            "nu_N": fmt(self.nu_N),
            "overall": fmt(self.overall),
            "overall_decimal": float(self.overall),
            "h_exponent": str(self.h_exponent),
            "h_threshold": fmt(self.h_threshold),
            "h_feasible": self.h_feasible,
            "cases": [
                {
                    "label": c.label,
                    "constraint": c.constraint,
                    "nu_D_range": None if c.nu_range is None else [fmt(c.nu_range[0]), fmt(c.nu_range[1])],
                    "terms": [{"term": t.label, "exponent": str(t)} for t in c.terms],
                    "maximum": None if c.maximum is None else fmt(c.maximum),
                    "argmax": None if c.argmax is None else fmt(c.argmax),
                }
                for c in self.cases
            ],
        }


_F = Fraction
# exponents of x, writing D = x^nu_D
CASE_I_TERMS = (
    Affine(_F(2, 9), _F(1, 3), "D^(2/9) x^(1/3)"),
    Affine(_F(2), _F(-1), "D^2 / x"),
)
CASE_II_TERMS = (
    Affine(_F(1, 2) + _F(1, 12), _F(1, 6), "x^(1/6) D^(1/2) D^(1/12)"),
    Affine(_F(3, 4), _F(0), "D^(3/4)"),
    Affine(_F(3, 2), _F(-1, 2), "x^(-1/2) D^(3/2)"),
)
H_EXPONENT = Affine(_F(7, 9), _F(-1, 3), "H = D^(7/9) x^(-1/3)")


def _maximize(terms, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    # affine terms peak at an endpoint of the closed interval
    best = None
    for v in (lo, hi):
        val = max(t(v) for t in terms)
        if best is None or val > best[0]:
            best = (val, v)
    return best


def case_ledger(nu_N) -> LedgerReport:
    """Exponent bookkeeping for the three divisor-size cases.

    With N = x^nu_N the dyadic size D = x^nu_D ranges over [nu_N, 1 - nu_N].
    Each case's bound exponent is maximised over that closed range; the
    overall exponent also includes the nu_N coming from the short initial
    sum over n <= N.
    """
    nu = parse_rational(nu_N)
    if not 0 < nu < 1:
        raise ValueError(f"nu_N must lie in (0, 1), got {fmt(nu)}")
    lo, hi = nu, 1 - nu
    threshold = -H_EXPONENT.offset / H_EXPONENT.slope
    cases = []
    overall = nu
    specs = (
        ("I", "D_k >= D^(2/3)", CASE_I_TERMS),
        ("II", "D^(1/3) <= D_k <= D^(2/3)", CASE_II_TERMS),
        ("III", "D_k <= D^(1/3)", CASE_II_TERMS),
    )
    for label, constraint, terms in specs:
        if lo > hi:
            cases.append(CaseEntry(label, constraint, terms, None, None, None))
            continue
        val, arg = _maximize(terms, lo, hi)
        overall = max(overall, val)
        cases.append(CaseEntry(label, constraint, terms, (lo, hi), val, arg))
    feasible = lo > hi or lo >= threshold
    return LedgerReport(nu, tuple(cases), overall, H_EXPONENT, threshold, feasible)


def balanced_cutoff() -> Fraction:
    """The nu_N minimising ``case_ledger(nu_N).overall``.

    Every case term is increasing in nu_D, so its maximum a(1 - nu) + b falls
    as nu grows while the initial-sum exponent nu rises; the optimum is the
    largest of the crossing points (a + b) / (1 + a).
    """
    terms = CASE_I_TERMS + CASE_II_TERMS
    return max((t.slope + t.offset) / (1 + t.slope) for t in terms)


def pair_record(word: str, pair: ExponentPair) -> dict:
    th = theta(pair)
    return {
        "word": word,
        "kappa": fmt(pair.kappa),
        "lambda": fmt(pair.lam),
        "theta": fmt(th),
        "decimal": float(th),
    }
