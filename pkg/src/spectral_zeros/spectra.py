"""Energy spectra and direct Boltzmann summation.

A Spectrum is one of four level sequences:

* oscillator(E0):  E_n = (n + 1/2) E0, n >= 0
* primon:          E_n = ln n, n >= 1 (so the partition sum is literally
                    the truncated Dirichlet series for zeta)
* affine(a, g):    E_n = a + n g, n >= 0
* explicit:        a finite ascending list

partition_direct sums exp(-beta E_n) term by term; this is the
"energy-level side" of the spectrum/zeros duality and is deliberately
kept independent of every closed form and product evaluation elsewhere
in the package.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .core import (
    DivergenceDomainError,
    EvaluationResult,
    PoleError,
    TWO_PI,
    result_from_value,
)

_DEFAULT_TERMS = {"oscillator": 1000, "affine": 1000, "primon": 100_000}


@dataclass(frozen=True)
class Spectrum:
    """Immutable level-sequence description; build via the factories below."""

    kind: str
    label: str = ""
    e0: float = 0.0
    offset: float = 0.0
    gap: float = 0.0
    levels: tuple[float, ...] = ()


def oscillator(e0: float, label: str = "oscillator") -> Spectrum:
    if not e0 > 0:
        raise ValueError(f"oscillator quantum must be positive, got {e0}")
    return Spectrum(kind="oscillator", label=label, e0=float(e0),
                    offset=0.5 * float(e0), gap=float(e0))


def primon(label: str = "primon") -> Spectrum:
    return Spectrum(kind="primon", label=label)


def affine(offset: float, gap: float, label: str = "affine") -> Spectrum:
    if not gap > 0:
        raise ValueError(f"affine gap must be positive, got {gap}")
    return Spectrum(kind="affine", label=label, offset=float(offset), gap=float(gap))


def explicit(levels: Sequence[float], label: str = "explicit") -> Spectrum:
    lv = tuple(float(x) for x in levels)
    if not lv:
        raise ValueError("explicit spectrum needs at least one level")
    for i, x in enumerate(lv):
        if not math.isfinite(x):
            raise ValueError(f"level {i} is not finite: {x}")
        if i and not x > lv[i - 1]:
            raise ValueError(f"levels must be strictly ascending, violated at index {i}")
    return Spectrum(kind="explicit", label=label, levels=lv)


def energy_level(spec: Spectrum, n: int) -> float:
    """E_n for the given spectrum; primon indexes from n=1, the rest from 0."""
    if spec.kind == "primon":
        if n < 1:
            raise IndexError(f"primon levels start at n=1, got n={n}")
        return math.log(n)
    if n < 0:
        raise IndexError(f"level index must be >= 0, got n={n}")
    if spec.kind == "oscillator":
        return (n + 0.5) * spec.e0  # fused form keeps (n + 1/2) E0 exact
    if spec.kind == "affine":
        return spec.offset + n * spec.gap
    if spec.kind == "explicit":
        if n >= len(spec.levels):
            raise IndexError(f"explicit spectrum has {len(spec.levels)} levels, got n={n}")
        return spec.levels[n]
    raise ValueError(f"unknown spectrum kind {spec.kind!r}")


def _require_convergent(spec: Spectrum, beta: complex) -> None:
    if spec.kind in ("oscillator", "affine"):
        if not beta.real * spec.gap > 0:
            raise DivergenceDomainError(
                f"Boltzmann sum diverges for Re(beta)*gap = {beta.real * spec.gap} <= 0",
                abscissa=0.0)
    elif spec.kind == "primon":
        if not beta.real > 1:
            raise DivergenceDomainError(
                "primon sum is the Dirichlet series for zeta; its abscissa of "
                f"convergence is 1 and Re(beta) = {beta.real} <= 1", abscissa=1.0)


def partition_direct(spec: Spectrum, beta: complex, n_terms: int | None = None,
                     tail: Literal["none", "geometric"] = "none") -> EvaluationResult:
    """Truncated Boltzmann sum sum_{n < n_terms} exp(-beta E_n).

    tail="geometric" adds the exact geometric remainder for the
    oscillator/affine kinds (no-op for the others, whose tails are not
    geometric).  error_estimate bounds the omitted tail; with the
    geometric tail added it covers truncation only and is 0.
    """
    beta = complex(beta)
    if n_terms is None:
        n_terms = _DEFAULT_TERMS.get(spec.kind, 0) or len(spec.levels)
    if n_terms < 1:
        raise ValueError(f"n_terms must be >= 1, got {n_terms}")
    _require_convergent(spec, beta)

    if spec.kind in ("oscillator", "affine"):
        n = np.arange(n_terms)
        if spec.kind == "oscillator":
            energies = (n + 0.5) * spec.e0
        else:
            energies = spec.offset + n * spec.gap
        total = complex(np.sum(np.exp(-beta * energies)))
        r = cmath.exp(-beta * spec.gap)           # |r| < 1 here
        head = cmath.exp(-beta * spec.offset) * r ** n_terms
        if tail == "geometric":
            return result_from_value(total + head / (1.0 - r), 0.0, n_terms)
        err = abs(head) / (1.0 - abs(r))
        return result_from_value(total, err, n_terms)

    if spec.kind == "primon":
        # sum_{n=1}^{N} n^(-beta), in chunks to keep memory flat at large N
        total = 0j
        chunk = 1 << 18
        for lo in range(1, n_terms + 1, chunk):
            n = np.arange(lo, min(lo + chunk, n_terms + 1), dtype=np.float64)
            total += complex(np.sum(n ** (-beta)))
        err = n_terms ** (1.0 - beta.real) / (beta.real - 1.0)
        return result_from_value(total, err, n_terms)

    if spec.kind == "explicit":
        used = min(n_terms, len(spec.levels))
        lv = np.asarray(spec.levels)
        total = complex(np.sum(np.exp(-beta * lv[:used])))
        err = float(np.sum(np.exp(-beta.real * lv[used:])))
        return result_from_value(total, err, used)

    raise ValueError(f"unknown spectrum kind {spec.kind!r}")


def closed_form_oscillator(beta: complex, e0: float) -> complex:
    """exp(-beta E0/2) / (1 - exp(-beta E0)), i.e. 1/(2 sinh(beta E0/2)).

    Raises PoleError carrying the nearest integer k when beta*E0 is
    within 1e-12 of a pole 2 pi i k (k = 0 is the essential 1/(beta E0)
    divergence).
    """
    if not e0 > 0:
        raise ValueError(f"oscillator quantum must be positive, got {e0}")
    x = complex(beta) * e0
    k = round(x.imag / TWO_PI)
    if abs(x - complex(0.0, TWO_PI * k)) < 1e-12:
        raise PoleError(f"closed form has a pole at beta*E0 = 2*pi*i*{k}",
                        location=complex(beta), nearest=k)
    return 1.0 / (2.0 * cmath.sinh(0.5 * x))


def closed_form_affine(beta: complex, offset: float, gap: float) -> complex:
    """exp(-beta*offset) / (1 - exp(-beta*gap)), the geometric closed form.

    Poles sit at beta*gap = 2*pi*i*k independently of the offset, which
    only scales the residues; this is the analytic content of "the poles
    alone can't determine the energy level".
    """
    if not gap > 0:
        raise ValueError(f"affine gap must be positive, got {gap}")
    x = complex(beta) * gap
    k = round(x.imag / TWO_PI)
    if abs(x - complex(0.0, TWO_PI * k)) < 1e-12:
        raise PoleError(f"closed form has a pole at beta*gap = 2*pi*i*{k}",
                        location=complex(beta), nearest=k)
    return cmath.exp(-complex(beta) * offset) / (1.0 - cmath.exp(-x))


def load_spectrum_file(path, label: str | None = None) -> Spectrum:
    """Read an explicit spectrum: one real level per line, ascending,
    '#' starts a comment."""
    levels = []
    with open(path) as fh:
        for ln, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                levels.append(float(text))
            except ValueError:
                raise ValueError(f"{path}:{ln}: not a real number: {text!r}") from None
    if not levels:
        raise ValueError(f"{path}: no levels found")
    try:
        return explicit(levels, label=label if label is not None else str(path))
    except ValueError as e:
        raise ValueError(f"{path}: {e}") from None
