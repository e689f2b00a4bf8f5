"""Sawtooth function, Vaaler's trigonometric approximation and exponential sums.

psi(t) = t - floor(t) - 1/2.  Its truncated Fourier series, damped by the
weight W, gives the trigonometric polynomial ``psi_star`` of degree H, whose
pointwise error is dominated by the Fejer-type kernel ``fejer_delta``.

The module also evaluates the two kinds of exponential sums that appear when
the sawtooth is expanded over divisors: the single sum over d ~ D of
e(hx/(d + shift)), and the weighted triple sum over (h, m, n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvariantViolation, ResourceError
from .exppair import HALF_HALF, ExponentPair

TWO_PI = 2.0 * math.pi
_HALF = Fraction(1, 2)

TRIPLE_SUM_BUDGET = 10**8


def psi(t):
    """Sawtooth t - floor(t) - 1/2, with value -1/2 at the integers.

    Exact for ``int``/``Fraction`` input; floats and arrays go through numpy.
    """
    if isinstance(t, (int, Fraction)):
        return t - math.floor(t) - _HALF
    t = np.asarray(t, dtype=np.float64)
    out = t - np.floor(t) - 0.5
    return float(out) if out.ndim == 0 else out


def _pi_t_cot_pi_t(t: np.ndarray) -> np.ndarray:
    # series below 1e-6: 1 - (pi t)^2/3 - (pi t)^4/45
    small = np.abs(t) < 1e-6
    z = np.pi * t
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = z / np.tan(z)
    z2 = z * z
    series = 1.0 - z2 / 3.0 - z2 * z2 / 45.0
    return np.where(small, series, direct)


def vaaler_W(t):
    """W(t) = pi t (1 - |t|) cot(pi t) + |t| on (-1, 1), with W(0) = 1."""
    arr = np.asarray(t, dtype=np.float64)
    if np.any(np.abs(arr) >= 1.0):
        raise ValueError("vaaler_W is defined only for |t| < 1")
    a = np.abs(arr)
    out = (1.0 - a) * _pi_t_cot_pi_t(a) + a
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class VaalerKernel:
    """Coefficients W(h/(H+1)) / (2 pi h) for h = 1..H."""

    H: int
    coefficients: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, H: int) -> "VaalerKernel":
        H = int(H)
        if H < 1:
            raise ValueError(f"H must be >= 1, got {H}")
        h = np.arange(1, H + 1, dtype=np.float64)
        coef = vaaler_W(h / (H + 1)) / (TWO_PI * h)
        if not np.all(np.isfinite(coef)):
            raise InvariantViolation(f"non-finite Vaaler coefficient for H={H}")
        coef.flags.writeable = False
        return cls(H, coef)

    def __call__(self, x):
        return psi_star(x, self.H, kernel=self)


def psi_star(x, H: int, kernel: VaalerKernel | None = None):
    """Vaaler's degree-H trigonometric approximation of psi.

    The +h and -h terms of -sum (2 pi i h)^{-1} W(h/(H+1)) e(hx) pair up
    into the real sine sum -sum_{h<=H} W(h/(H+1)) sin(2 pi h x) / (pi h).
    """
    if kernel is None or kernel.H != H:
        kernel = VaalerKernel.build(H)
    x = np.asarray(x, dtype=np.float64)
    frac = x - np.floor(x)
    h = np.arange(1, kernel.H + 1, dtype=np.float64)
    # 2 * coef = W / (pi h)
    s = np.sin(TWO_PI * np.multiply.outer(frac, h))
    out = -(s @ (2.0 * kernel.coefficients))
    return float(out) if out.ndim == 0 else out


def psi_star_complex(x: float, H: int) -> complex:
    """Direct complex evaluation over 1 <= |h| <= H (slow; for cross-checks)."""
    total = 0j
    for h in range(-H, H + 1):
        if h == 0:
            continue
        w = vaaler_W(abs(h) / (H + 1))
        total += -w / (2j * math.pi * h) * complex(math.cos(TWO_PI * h * x), math.sin(TWO_PI * h * x))
    return total


def fejer_delta_direct(x, H: int):
    """(1/(2H+2)) * sum_{|h|<=H} (1 - |h|/(H+1)) e(hx), summed directly."""
    x = np.asarray(x, dtype=np.float64)
    frac = x - np.floor(x)
    h = np.arange(1, H + 1, dtype=np.float64)
    w = 1.0 - h / (H + 1)
    c = np.cos(TWO_PI * np.multiply.outer(frac, h))
    out = (1.0 + 2.0 * (c @ w)) / (2 * H + 2)
    return float(out) if out.ndim == 0 else out


def fejer_delta(x, H: int):
    """Fejer majorant (1 / (2 (H+1)^2)) * (sin(pi (H+1) x) / sin(pi x))^2.

    The closed form is used where |sin(pi x)| > 1e-8, the direct sum elsewhere.
    """
    H = int(H)
    if H < 1:
        raise ValueError(f"H must be >= 1, got {H}")
    x = np.asarray(x, dtype=np.float64)
    frac = x - np.floor(x)
    # delta is even and 1-periodic; folding keeps sin(pi t) well conditioned near 1
    frac = np.minimum(frac, 1.0 - frac)
    den = np.sin(np.pi * frac)
    near = np.abs(den) <= 1e-8
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.sin(np.pi * (H + 1) * frac) / den
    out = ratio * ratio / (2.0 * (H + 1) ** 2)
    if np.any(near):
        out = np.where(near, fejer_delta_direct(frac, H), out)
    return float(out) if out.ndim == 0 else out


def vaaler_grid(grid_size: int, span: tuple[int, int] = (-1, 2)) -> np.ndarray:
    """Evaluation grid: uniform points, every integer in the span, and
    points within 1e-12..1e-4 on either side of each integer."""
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    lo, hi = span
    base = np.linspace(lo, hi, grid_size)
    ints = np.arange(lo, hi + 1, dtype=np.float64)
    offs = np.array([1e-12, 1e-9, 1e-6, 1e-4])
    near = np.concatenate([ints[:, None] + offs, ints[:, None] - offs]).ravel()
    return np.unique(np.concatenate([base, ints, near]))


@dataclass(frozen=True)
class VaalerScan:
    H: int
    x: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)
    psi_star: np.ndarray = field(repr=False)
    delta: np.ndarray = field(repr=False)
    max_violation: float = 0.0
    argmax: float = 0.0
    min_delta: float = 0.0

    @property
    def gap(self) -> np.ndarray:
        return np.abs(self.psi_star - self.psi) - self.delta


def vaaler_gap_scan(H: int, grid_size: int, span: tuple[int, int] = (-1, 2)) -> VaalerScan:
    """Scan |psi*(x) - psi(x)| - delta(x) over ``vaaler_grid``.

    The inequality says the result should never be positive; anything above
    1e-9 is more than rounding.
    """
    x = vaaler_grid(grid_size, span)
    ps = psi(x)
    star = psi_star(x, H)
    dl = fejer_delta(x, H)
    gap = np.abs(star - ps) - dl
    i = int(np.argmax(gap))
    return VaalerScan(
        H=int(H),
        x=x,
        psi=ps,
        psi_star=star,
        delta=dl,
        max_violation=float(gap[i]),
        argmax=float(x[i]),
        min_delta=float(dl.min()),
    )


# ---------------------------------------------------------------------------
# exponential sums


def _phase_frac(num: int, den: np.ndarray) -> np.ndarray:
    """frac(num / den) for an integer numerator, computed exactly in integers."""
    return (num % den) / den


def expsum_single(h: int, x, D: int, shift: int = 0) -> float:
    """|sum_{D < d <= 2D} e(h x / (d + shift))|.

    For integer h*x the phase is reduced modulo 1 in exact integer arithmetic
    before the trig call; the real and imaginary parts are accumulated with
    ``math.fsum``.
    """
    h, D = int(h), int(D)
    if D < 1:
        raise ValueError(f"D must be >= 1, got {D}")
    if shift not in (0, 1):
        raise ValueError(f"shift must be 0 or 1, got {shift}")
    d = np.arange(D + 1, 2 * D + 1, dtype=np.int64) + shift
    hx = h * x
    if isinstance(hx, int) or (isinstance(hx, float) and hx.is_integer() and abs(hx) < 2**53):
        frac = _phase_frac(int(hx), d)
    else:
        frac = np.fmod(float(hx) / d, 1.0)
    ang = TWO_PI * frac
    re = math.fsum(np.cos(ang).tolist())
    im = math.fsum(np.sin(ang).tolist())
    return math.hypot(re, im)


def vdc_bound(h: int, x, D: int, pair: ExponentPair = HALF_HALF) -> float:
    """Y^kappa X^lambda + 1/Y with X = D and Y = h x / D."""
    X = float(D)
    Y = float(h) * float(x) / X
    if Y <= 0:
        raise ValueError("vdc_bound needs h x > 0")
    return Y ** float(pair.kappa) * X ** float(pair.lam) + 1.0 / Y


@dataclass
class TripleSumSpec:
    """Parameters of the weighted triple exponential sum.

    The phase at (h, m, n) is X * M^beta N^gamma / H^alpha * h^alpha / (m^beta n^gamma + shift)
    with h ~ H, m ~ M, n ~ N meaning H < h <= 2H and so on.  ``a`` has shape
    (H, N) and ``b`` shape (M,); all entries need modulus <= 1.
    """

    X: float
    H: int
    M: int
    N: int
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    shift: float = 0.0
    a: np.ndarray | None = None
    b: np.ndarray | None = None
    eps: float = 0.01

    def __post_init__(self):
        self.H, self.M, self.N = int(self.H), int(self.M), int(self.N)
        if min(self.H, self.M, self.N) < 1:
            raise ValueError("H, M, N must be >= 1")
        if self.X <= 0 or min(self.alpha, self.beta, self.gamma) <= 0:
            raise ValueError("X, alpha, beta, gamma must be positive")
        window = self.N ** (self.gamma - 1) * self.M**self.beta
        if self.H > window * (1 + 1e-12):
            raise ValueError(f"H={self.H} exceeds the uniformity window N^(gamma-1) M^beta = {window:g}")
        if abs(self.shift) > 1 / self.eps:
            raise ValueError(f"|shift| must be <= 1/eps = {1 / self.eps:g}")
        if self.a is None:
            self.a = np.ones((self.H, self.N), dtype=np.complex128)
        if self.b is None:
            self.b = np.ones(self.M, dtype=np.complex128)
        self.a = np.asarray(self.a, dtype=np.complex128)
        self.b = np.asarray(self.b, dtype=np.complex128)
        if self.a.shape != (self.H, self.N) or self.b.shape != (self.M,):
            raise ValueError("coefficient arrays have the wrong shape")
        if np.abs(self.a).max(initial=0) > 1 + 1e-12 or np.abs(self.b).max(initial=0) > 1 + 1e-12:
            raise ValueError("coefficients must have modulus <= 1")

    @property
    def terms(self) -> int:
        return self.H * self.M * self.N

    def describe(self) -> dict:
        return {
            "X": self.X,
            "H": self.H,
            "M": self.M,
            "N": self.N,
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "shift": self.shift,
        }


def triple_lemma_bound(spec: TripleSumSpec, pair: ExponentPair = HALF_HALF) -> float:
    """Four-term bound for the triple sum with the X^eps factor dropped."""
    k, l = float(pair.kappa), float(pair.lam)
    X, H, M, N = float(spec.X), float(spec.H), float(spec.M), float(spec.N)
    first = (X**k * H ** (2 + k) * M ** (1 + k + l) * N ** (2 + k)) ** (1 / (2 + 2 * k))
    return first + H * M**0.5 * N + H**0.5 * M * N**0.5 + X**-0.5 * H * M * N


@dataclass(frozen=True)
class TripleSumResult:
    spec: TripleSumSpec
    magnitude: float
    lemma_bound: float
    ratio: float

    def record(self) -> dict:
        return {
            "spec": self.spec.describe(),
            "magnitude": self.magnitude,
            "bound": self.lemma_bound,
            "ratio": self.ratio,
        }


def triple_sum_eval(spec: TripleSumSpec, pair: ExponentPair = HALF_HALF, budget: int = TRIPLE_SUM_BUDGET) -> TripleSumResult:
    """Direct evaluation of the triple sum, chunked over h.

    Raises ``InvariantViolation`` if the result exceeds the trivial bound
    H*M*N; the ratio to the lemma bound is only a diagnostic.
    """
    if spec.terms > budget:
        raise ResourceError(f"H*M*N = {spec.terms} exceeds the direct-evaluation budget {budget}")
    scale = spec.X * spec.M**spec.beta * spec.N**spec.gamma / spec.H**spec.alpha
    m = np.arange(spec.M + 1, 2 * spec.M + 1, dtype=np.float64)
    n = np.arange(spec.N + 1, 2 * spec.N + 1, dtype=np.float64)
    den = np.multiply.outer(m**spec.beta, n**spec.gamma) + spec.shift
    if np.any(den == 0):
        raise ValueError("shift makes a phase denominator vanish")
    inv = 1.0 / den
    partial = np.empty(spec.H, dtype=np.complex128)
    for i, h in enumerate(range(spec.H + 1, 2 * spec.H + 1)):
        ph = np.fmod(scale * h**spec.alpha * inv, 1.0)
        e = np.exp(1j * TWO_PI * ph)
        # sum over m of b_m e(...), then weight each n by a_{h,n}
        partial[i] = np.sum((spec.b @ e) * spec.a[i])
    total = np.sum(partial)
    mag = float(abs(total))
    if mag > spec.terms * (1 + 1e-9):
        raise InvariantViolation(f"|S| = {mag} exceeds the trivial bound H*M*N = {spec.terms}")
    bound = triple_lemma_bound(spec, pair)
    return TripleSumResult(spec, mag, bound, mag / bound)


def random_triple_spec(rng: np.random.Generator, budget: int = 2 * 10**5) -> TripleSumSpec:
    """A random admissible spec with complex unit-disc coefficients."""
    while True:
        H = int(rng.integers(1, 9))
        M = int(rng.integers(1, 65))
        N = int(rng.integers(1, 65))
        if H * M * N > budget or H > M:
            continue
        X = float(10 ** rng.uniform(0, 6))
        shift = float(rng.integers(0, 2))
        r = rng.uniform(0, 1, (H, N))
        a = r * np.exp(1j * rng.uniform(0, TWO_PI, (H, N)))
        b = rng.uniform(0, 1, M) * np.exp(1j * rng.uniform(0, TWO_PI, M))
        return TripleSumSpec(X=X, H=H, M=M, N=N, shift=shift, a=a, b=b)
