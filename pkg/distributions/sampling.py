import numpy as np

from distributions.core import FamilySpec, quantile
from ingest.sample import Sample
from utils.errors import DomainError

# Smallest positive double: keeps every uniform draw strictly inside (0, 1)
_U_LOW = np.nextafter(0.0, 1.0)


def sample(spec: FamilySpec, n: int, seed: int) -> Sample:
    """n inverse-transform draws from ``spec``; the same seed gives the same vector."""
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n!r}")
    rng = np.random.default_rng(seed)
    u = rng.uniform(_U_LOW, 1.0, size=int(n))
    values = np.atleast_1d(quantile(spec, u))
    return Sample(values, source=f"sample {spec} seed={seed}")
