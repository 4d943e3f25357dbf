"""Exact counting sums, limsup-set measures and dichotomy experiments.

Rational results come back as fractions.Fraction. Partitions are strings
such as "1,3|2,4"; an empty string means the trivial partition.
"""

from ._kgds import (  # noqa: F401
    IoError,
    ResourceLimitError,
    ValidationError,
    canonical_partition,
    count_coprime_interval,
    count_coprime_shell,
    count_primitive_ball,
    counting_sum,
    dirichlet_identity,
    funny_report,
    funny_sum,
    has_ell,
    in_set,
    measure,
    measure_A_exact,
    mu,
    phi,
    run,
    series,
    sum_phi_gcd_ball,
)

__all__ = [name for name in dir() if not name.startswith("_")]
