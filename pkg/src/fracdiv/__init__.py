"""Exact fractional divisor sums and the arithmetic around their error term."""

__version__ = "0.1.0"

from .divisors import (  # noqa: E402
    DivisorTable,
    Factorization,
    divisor_summatory,
    factorize,
    is_prime,
    sieve_tau_k,
    tau_k_at,
    tau_k_batch,
)
from .exppair import (  # noqa: E402
    ExponentPair,
    a_process,
    apply_word,
    b_process,
    case_ledger,
    lwy_theta,
    search_theta,
    theta,
)
from .fracsum import (  # noqa: E402
    decomposition_check,
    error_scan,
    fracsum_blocks,
    fracsum_naive,
    main_constant,
    quotient_blocks,
)
from .vaaler import (  # noqa: E402
    TripleSumSpec,
    expsum_single,
    fejer_delta,
    psi,
    psi_star,
    triple_sum_eval,
    vaaler_W,
    vaaler_gap_scan,
    vdc_bound,
)

__all__ = [
    "DivisorTable",
    "ExponentPair",
    "Factorization",
    "TripleSumSpec",
    "a_process",
    "apply_word",
    "b_process",
    "case_ledger",
    "decomposition_check",
    "divisor_summatory",
    "error_scan",
    "expsum_single",
    "factorize",
    "fejer_delta",
    "fracsum_blocks",
    "fracsum_naive",
    "is_prime",
    "lwy_theta",
    "main_constant",
    "psi",
    "psi_star",
    "quotient_blocks",
    "search_theta",
    "sieve_tau_k",
    "tau_k_at",
    "tau_k_batch",
    "theta",
    "triple_sum_eval",
    "vaaler_W",
    "vaaler_gap_scan",
    "vdc_bound",
]
