from __future__ import annotations

from src.analysis.certificate import (
    CONVERGED,
    INCONCLUSIVE,
    OSCILLATING,
    Certificate,
    certify,
    feasibility,
    fw_gap_dominance,
    gamma_below_one,
    gamma_trend,
    reference_agreement,
    strip_lmo,
    vertices_on_segment,
)
from src.analysis.events import (
    Displacements,
    NonCauchy,
    band_crossings,
    displacement_events,
    non_cauchy_certificate,
)
from src.analysis.rates import AnalysisError, check_rates, rate_bound

__all__ = [
    "AnalysisError",
    "CONVERGED",
    "Certificate",
    "Displacements",
    "INCONCLUSIVE",
    "NonCauchy",
    "OSCILLATING",
    "band_crossings",
    "certify",
    "check_rates",
    "displacement_events",
    "feasibility",
    "fw_gap_dominance",
    "gamma_below_one",
    "gamma_trend",
    "non_cauchy_certificate",
    "rate_bound",
    "reference_agreement",
    "strip_lmo",
    "vertices_on_segment",
]
