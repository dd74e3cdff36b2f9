"""Tolerances, run defaults and the error types shared across the package."""

from __future__ import annotations

import os

VERSION = "0.1.0"
TOOL_NAME = "qjw"

TOL_HERM_REL = 1e-10
TOL_ORTH = 1e-9
TOL_RANK = 1e-8
TOL_EIG = 1e-9
TOL_UNITARY = 1e-12
TOL_PSD = 1e-9
TOL_DESIGN = 1e-9
TOL_SPAN = 1e-8
CLUSTER_GAP = 1e-6
# largest tolerated gap between the two concurrence routes
TOL_CONCURRENCE = 1e-8

CLOSURE_ROUND_CAP = 64
WORD_SAMPLES = 1000
HAAR_SAMPLES = 50
DEFAULT_SEED = 0

TOL_ENV_VAR = "QJW_TOL"
LONG_ENV_VAR = "QJW_LONG"


class ClosureCapExceeded(RuntimeError):
    """A Jordan or C* closure did not reach a fixed point within the round cap."""


class IdentificationError(RuntimeError):
    """A simple summand could not be matched to a unique Jordan algebra."""


class ExceptionalFactorError(RuntimeError):
    """Composite formation was requested with the exceptional algebra M3(O)."""


class ReconstructionError(RuntimeError):
    """An operator could not be expanded in a supposed design."""


def default_tolerance() -> float:
    raw = os.environ.get(TOL_ENV_VAR)
    if raw is None or raw.strip() == "":
        return TOL_DESIGN
    try:
        value = float(raw)
    except ValueError as exc:
        raise ValueError(f"{TOL_ENV_VAR} must be a float, got {raw!r}") from exc
    if not value > 0.0:
        raise ValueError(f"{TOL_ENV_VAR} must be positive, got {value}")
    return value


def long_tests_enabled() -> bool:
    return os.environ.get(LONG_ENV_VAR, "") not in ("", "0", "false", "no")


def tolerance_table() -> dict[str, float]:
    return {
        "tol_herm_rel": TOL_HERM_REL,
        "tol_orth": TOL_ORTH,
        "tol_rank": TOL_RANK,
        "tol_eig": TOL_EIG,
        "tol_unitary": TOL_UNITARY,
        "tol_psd": TOL_PSD,
        "tol_design": TOL_DESIGN,
        "tol_span": TOL_SPAN,
        "tol_concurrence": TOL_CONCURRENCE,
    }
