from distributions.core import (
    FamilySpec,
    cdf,
    log_pdf,
    make_spec,
    moment,
    pdf,
    quantile,
    reduce_to_submodel,
    sf,
)
from distributions.families import FAMILIES, FAMILY_ORDER, Family, get_family
from distributions.sampling import sample

__all__ = [
    "FAMILIES",
    "FAMILY_ORDER",
    "Family",
    "FamilySpec",
    "cdf",
    "get_family",
    "log_pdf",
    "make_spec",
    "moment",
    "pdf",
    "quantile",
    "reduce_to_submodel",
    "sample",
    "sf",
]
