"""Root-based stability oracles, the Routh array, and target polynomials."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, NodeCountError
from .hermite import NodeSet
from .polynomials import PolyInS, ReImPair, split_re_im

_MARGINAL = 1e-9


def roots(q: PolyInS) -> np.ndarray:
    """Polynomial roots via the companion-matrix eigenvalues, with one Newton
    polishing step to sharpen agreement with printed reference values."""
    if not q.is_numeric:
        raise DegenerateInputError("roots requires a numeric polynomial")
    c = np.asarray(q.numeric_coeffs(), dtype=complex)
    d = q.degree_actual()
    if d < 1:
        raise DegenerateInputError("degree must be at least 1")
    if abs(c[d]) <= 1e-14 * np.max(np.abs(c)):
        raise DegenerateInputError("leading coefficient vanishes")
    rts = np.roots(c[d::-1])
    dq = q.diff()
    polished = []
    for r in rts:
        fp = dq.eval(r, k=[])
        if abs(fp) > 1e-12:
            r = r - q.eval(r, k=[]) / fp
        polished.append(r)
    return np.asarray(polished)


def is_hurwitz(q: PolyInS) -> tuple[bool, float]:
    """(stable, margin): stable iff every root has strictly negative real part;
    margin is the largest real part."""
    rts = roots(q)
    margin = float(np.max(rts.real))
    return margin < 0.0, margin


def routh_hurwitz(q: PolyInS) -> bool:
    """Tabular Routh array test; zero first-column pivots fall back to an
    epsilon perturbation."""
    if not q.is_numeric:
        raise DegenerateInputError("routh_hurwitz requires a numeric polynomial")
    c = np.asarray(q.numeric_coeffs(), dtype=float)
    d = q.degree_actual()
    if d < 1:
        raise DegenerateInputError("degree must be at least 1")
    if c[d] < 0:
        c = -c
    desc = c[d::-1]
    width = (d + 2) // 2
    row0 = np.zeros(width)
    row1 = np.zeros(width)
    row0[: len(desc[0::2])] = desc[0::2]
    row1[: len(desc[1::2])] = desc[1::2]
    scale = np.max(np.abs(desc))
    eps = 1e-30 * max(scale, 1.0)
    first_col = [row0[0]]
    prev, cur = row0, row1
    for _ in range(d):
        pivot = cur[0]
        if pivot == 0.0:
            pivot = eps
        first_col.append(pivot)
        nxt = np.zeros(width)
        for j in range(width - 1):
            nxt[j] = (pivot * prev[j + 1] - prev[0] * cur[j + 1]) / pivot
        prev, cur = cur, nxt
    return all(v > 0 for v in first_col)


@dataclass(frozen=True)
class TargetSpec:
    """How to build a target polynomial from open-loop poles."""

    mode: str = "mirror-shift"  # or "explicit-roots"
    roots: tuple[complex, ...] = field(default_factory=tuple)
    shift: float = -0.5

    def __post_init__(self):
        if self.mode not in ("mirror-shift", "explicit-roots"):
            raise DegenerateInputError(f"unknown target mode {self.mode!r}")
        if self.mode == "mirror-shift" and self.shift >= 0:
            raise DegenerateInputError("shift must be negative")


def build_target(open_loop_poles, spec: TargetSpec) -> PolyInS:
    """Monic target polynomial.

    Mirror-shift keeps stable poles and moves every unstable or marginal pole
    to the left half-plane: real poles to the shift value, complex pairs by
    replacing the real part with the shift (imaginary part preserved).
    """
    if spec.mode == "explicit-roots":
        if not spec.roots:
            raise DegenerateInputError("explicit-roots target needs roots")
        return PolyInS.from_roots(spec.roots)
    poles = [complex(p) for p in open_loop_poles]
    if not poles:
        raise DegenerateInputError("empty pole list")
    out = []
    for pole in poles:
        if pole.real < -_MARGINAL:
            out.append(pole)
        elif abs(pole.imag) <= _MARGINAL * (1.0 + abs(pole)):
            out.append(complex(spec.shift, 0.0))
        else:
            out.append(complex(spec.shift, pole.imag))
    return PolyInS.from_roots(out)


def nodes_from_target(target: PolyInS, part: str = "im") -> NodeSet:
    """Interpolation nodes: roots of the imaginary (default) or real part of
    the target polynomial on the imaginary axis."""
    if part not in ("im", "re"):
        raise DegenerateInputError(f"part must be 'im' or 're', got {part!r}")
    n = target.degree_actual()
    pair = split_re_im(target)
    sel = pair.a if part == "im" else pair.b
    d = sel.degree_actual()
    if d != n:
        raise NodeCountError(
            f"{part} part has degree {d}, needs {n} roots; "
            "switch the node part or adjust the target"
        )
    return NodeSet.from_values(roots(sel))


def interlacing_check(pair: ReImPair) -> bool:
    """True iff the roots of both parts are real and strictly interlace."""
    da, db = pair.a.degree_actual(), pair.b.degree_actual()
    parts = [p for p, d in ((pair.a, da), (pair.b, db)) if d >= 1]
    for p in parts:
        for r in roots(p):
            if abs(r.imag) > _MARGINAL * (1.0 + abs(r)):
                return False
    if da < 1 or db < 1:
        return True  # a constant part interlaces vacuously
    ra, rb = roots(pair.a), roots(pair.b)
    sa = np.sort(ra.real)
    sb = np.sort(rb.real)
    if abs(len(sa) - len(sb)) != 1:
        return False
    lo, hi = (sa, sb) if len(sa) > len(sb) else (sb, sa)
    # strict alternation: each short-list root sits strictly between
    # consecutive long-list roots
    for i, r in enumerate(hi):
        if not (lo[i] + _MARGINAL < r < lo[i + 1] - _MARGINAL):
            return False
    return True
