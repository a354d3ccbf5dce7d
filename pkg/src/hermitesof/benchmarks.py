"""Embedded benchmark fixtures, instance-file ingestion, and experiment runs."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InputError
from .hermite import hermite_power, scaled_hermite
from .polynomials import MultiPoly, PolyInS, char_poly
from .solver import SofProgram, SolveConfig, SolveReport, solve_sof, verify_solution
from .stability import TargetSpec, build_target, roots
from .systems import SystemInstance

DATA_DIR_ENV = "HERMITESOF_DATA_DIR"


@dataclass(frozen=True)
class PolyFixture:
    """A characteristic polynomial known to printed precision."""

    name: str
    q: PolyInS
    provenance: str
    m: int = 1  # gain matrix shape when symbolic

    @property
    def p(self) -> int:
        return self.q.nvars // self.m if self.q.nvars else 0


def _mp(nv: int, const: float = 0.0, **lin) -> MultiPoly:
    """Affine MultiPoly helper: _mp(4, c, k1=..., k2=...)."""
    terms = {}
    if const:
        terms[(0,) * nv] = const
    for name, coeff in lin.items():
        idx = int(name[1:]) - 1
        mono = tuple(1 if i == idx else 0 for i in range(nv))
        terms[mono] = coeff
    return MultiPoly(nv, terms)


def _nn1_system() -> SystemInstance:
    return SystemInstance(
        name="NN1",
        A=[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 13.0, 0.0]],
        B=[[0.0], [0.0], [1.0]],
        C=[[0.0, 5.0, -1.0], [-1.0, -1.0, 0.0]],
    )


def _nn6_poly() -> PolyFixture:
    nv = 4
    coeffs = [
        _mp(nv, 0.0, k1=95113415.0),
        _mp(nv, -4.3155562e8, k2=95113415.0, k3=3133948.9),
        # The k3 coefficient sign follows the printed Hermite entries of this
        # benchmark, which are internally consistent (the polynomial display
        # carries the opposite sign); the 9th digit is fixed by the printed
        # k3^2 Hermite coefficient, which is a near-cancellation.
        _mp(nv, -1.5626281e8, k1=-12660338.0, k3=3174671.8199274541, k4=3133948.9),
        _mp(nv, 49276365.0, k2=-12660338.0, k3=35714.763, k4=3174671.8),
        _mp(nv, 20216420.0, k1=-57334.489, k3=36171.693, k4=35714.763),
        _mp(nv, 1149834.9, k2=-57334.489, k3=15.132810, k4=36171.693),
        _mp(nv, 91133.935, k1=-14.685000, k3=14.688300, k4=15.132810),
        _mp(nv, 4007.6500, k2=-14.688300, k4=14.685000),
        _mp(nv, 23.300000),
        _mp(nv, 1.0),
    ]
    return PolyFixture(
        name="NN6",
        q=PolyInS(coeffs, nvars=nv),
        provenance="closed-loop characteristic polynomial, printed to 8 digits",
        m=1,
    )


def _ac4_poly() -> PolyFixture:
    nv = 2
    coeffs = [
        _mp(nv, -66.837750, k1=-980.62500, k2=-867.10818),
        _mp(nv, -1330.6306, k1=-19613.407, k2=-18322.789),
        _mp(nv, 130.03210, k1=-18.135000, k2=-19612.500),
        _mp(nv, 150.92600),
        _mp(nv, 1.0),
    ]
    return PolyFixture(
        name="AC4",
        q=PolyInS(coeffs, nvars=nv),
        provenance="closed-loop characteristic polynomial, printed to 8 digits",
        m=1,
    )


def _ac4_openloop() -> PolyFixture:
    return PolyFixture(
        name="AC4_openloop",
        q=PolyInS.from_numeric(
            [-66.837750, -1330.6306, 130.03210, 150.92600, 1.0]
        ),
        provenance="open-loop characteristic polynomial, printed to 8 digits",
    )


def _nn5_openloop() -> PolyFixture:
    return PolyFixture(
        name="NN5_openloop",
        q=PolyInS.from_numeric(
            [6.3000000, -448.72180, 1.2196400, 2249.4849, 458.42510,
             96.515330, 10.171000, 1.0]
        ),
        provenance="open-loop characteristic polynomial, printed to 8 digits",
    )


def _targets() -> dict[str, TargetSpec]:
    pas_pair = (-36.646 + 523.05j, -36.646 - 523.05j)
    return {
        "NN6_sigma1": TargetSpec(
            mode="explicit-roots",
            roots=(
                -1.0000e-3 + 1.0j, -1.0000e-3 - 1.0j,
                -7.2028e-2 + 60.804j, -7.2028e-2 - 60.804j,
                -1.0785e-1 + 15.677j, -1.0785e-1 - 15.677j,
                -2.6764, -3.3000, -19.694,
            ),
        ),
        "AC4_shifted": TargetSpec(
            mode="explicit-roots",
            roots=(-5.0000e-2, -5.0000e-2, -3.4552, -150.00),
        ),
        "PAS_sigma1": TargetSpec(
            mode="explicit-roots",
            roots=(-5.0000e-2, -5.0000e-2, -9.5970e-1) + pas_pair,
        ),
        "PAS_sigma2": TargetSpec(
            mode="explicit-roots",
            roots=(-1.0000e-3, -1.0000e-3, -9.5970e-1) + pas_pair,
        ),
        "PAS_sigma3": TargetSpec(
            mode="explicit-roots",
            roots=(0.0, -1.0000e-4, -9.5970e-1) + pas_pair,
        ),
    }


# NN6 achievable-target fixture: printed random gain and the resulting
# imaginary-part root list.
NN6_ACHIEVABLE_GAIN = np.array([-4.3264e-1, -1.6656, 1.2537e-1, 2.8772e-1])
NN6_ACHIEVABLE_NODES = (
    0.0, 60.847, -60.847, 16.007, -16.007, 9.2218, -9.2218,
    2.7034j, -2.7034j,
)


def registry() -> dict:
    """Embedded paper fixtures, keyed by benchmark name."""
    return {
        "systems": {"NN1": _nn1_system()},
        "polys": {
            "NN6": _nn6_poly(),
            "AC4": _ac4_poly(),
            "AC4_openloop": _ac4_openloop(),
            "NN5_openloop": _nn5_openloop(),
        },
        "targets": _targets(),
        "gains": {"NN6_achievable": NN6_ACHIEVABLE_GAIN},
        "nodes": {"NN6_achievable": NN6_ACHIEVABLE_NODES},
    }


def get_plant(name: str):
    """Resolve a fixture name (or instance file path) to a plant object."""
    reg = registry()
    if name in reg["systems"]:
        return reg["systems"][name]
    if name in reg["polys"]:
        return reg["polys"][name]
    path = find_instance_file(name)
    if path is not None:
        return load_instance(path)
    raise InputError(f"unknown fixture or instance: {name}")


def find_instance_file(name: str) -> Path | None:
    p = Path(name)
    if p.suffix == ".json" and p.exists():
        return p
    data_dir = os.environ.get(DATA_DIR_ENV)
    if data_dir:
        cand = Path(data_dir) / f"{name}.json"
        if cand.exists():
            return cand
    return None


def load_instance(path) -> SystemInstance:
    """Load a plant from a JSON file {"name", "A", "B", "C"} (row-major)."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON: {exc}") from exc
    for key in ("name", "A", "B", "C"):
        if key not in raw:
            raise InputError(f"{path}: missing field {key!r}")
    try:
        return SystemInstance(
            name=str(raw["name"]),
            A=np.asarray(raw["A"], dtype=float),
            B=np.asarray(raw["B"], dtype=float),
            C=np.asarray(raw["C"], dtype=float),
            source="file",
        )
    except (ValueError, TypeError) as exc:
        raise InputError(f"{path}: non-numeric or ragged matrix data: {exc}") from exc


def save_instance(sys: SystemInstance, path) -> None:
    Path(path).write_text(
        json.dumps(
            {
                "name": sys.name,
                "A": sys.A.tolist(),
                "B": sys.B.tolist(),
                "C": sys.C.tolist(),
            },
            indent=1,
        )
    )


# -- experiment orchestration ---------------------------------------------


@dataclass
class ExperimentConfig:
    basis: str  # "power" | "lagrange"
    mu: float
    k0: Sequence[float] | None = None
    target: TargetSpec | None = None
    part: str = "im"
    lam0: float | None = None
    solver: SolveConfig | None = None


@dataclass
class ExperimentRow:
    system: str
    basis: str
    mu: float
    k0: str
    outer: int
    inner: int
    linesearch: int
    K: str
    lam: float
    status: str
    stable: bool


def _sym_poly(plant) -> tuple[PolyInS, int, int]:
    if isinstance(plant, SystemInstance):
        return char_poly(plant), plant.m, plant.p
    if isinstance(plant, PolyFixture):
        return plant.q, plant.m, plant.p
    raise InputError("plant must be a SystemInstance or PolyFixture")


def _fmt_vec(v) -> str:
    arr = np.atleast_2d(np.asarray(v, dtype=float))
    rows = [" ".join(f"{x:.8g}" for x in row) for row in arr]
    return "[" + "; ".join(rows) + "]"


def run_single(name: str, plant, cfg: ExperimentConfig) -> ExperimentRow:
    q, m, p = _sym_poly(plant)
    k0 = np.zeros(m * p) if cfg.k0 is None else np.asarray(cfg.k0, dtype=float)
    try:
        if cfg.basis == "power":
            H = hermite_power(q)
        elif cfg.basis == "lagrange":
            if cfg.target is None:
                raise InputError("lagrange basis requires a target spec")
            if cfg.target.mode == "explicit-roots":
                target = build_target([], cfg.target)
            else:
                open_poles = roots(q.at_gains(np.zeros(m * p)))
                target = build_target(open_poles, cfg.target)
            H = scaled_hermite(q, target, part=cfg.part)
        else:
            raise InputError(f"unknown basis {cfg.basis!r}")
        prog = SofProgram(H, mu=cfg.mu, m=m, p=p)
        scfg = cfg.solver or SolveConfig()
        scfg.k0 = k0
        scfg.lam0 = cfg.lam0
        report = solve_sof(prog, scfg)
        _, stable, _ = verify_solution(q, report.K)
        return ExperimentRow(
            system=name,
            basis=cfg.basis,
            mu=cfg.mu,
            k0=_fmt_vec(k0.reshape((m, p), order="F")),
            outer=report.outer_iters,
            inner=report.inner_iters,
            linesearch=report.linesearch_steps,
            K=_fmt_vec(report.K),
            lam=report.lam,
            status=report.status,
            stable=stable,
        )
    except Exception as exc:  # record, never abort the batch
        return ExperimentRow(
            system=name,
            basis=cfg.basis,
            mu=cfg.mu,
            k0=_fmt_vec(k0),
            outer=0,
            inner=0,
            linesearch=0,
            K="[]",
            lam=float("nan"),
            status=f"error: {exc}",
            stable=False,
        )


def run_experiment(
    instances: Sequence[tuple[str, object, ExperimentConfig]]
) -> list[ExperimentRow]:
    """Run each (name, plant, config) triple; plant=None marks missing data."""
    rows = []
    for name, plant, cfg in instances:
        if plant is None:
            rows.append(
                ExperimentRow(
                    system=name, basis=cfg.basis, mu=cfg.mu,
                    k0="[]", outer=0, inner=0, linesearch=0, K="[]",
                    lam=float("nan"), status="skipped: data not supplied",
                    stable=False,
                )
            )
            continue
        rows.append(run_single(name, plant, cfg))
    return rows


CSV_HEADER = "system,basis,mu,K0,outer,inner,linesearch,K,lambda,status,stable"


def rows_to_csv(rows: Sequence[ExperimentRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lam = "nan" if math.isnan(r.lam) else f"{r.lam:.8g}"
        status = r.status.replace(",", ";")
        lines.append(
            f"{r.system},{r.basis},{r.mu:.8g},{r.k0},{r.outer},{r.inner},"
            f"{r.linesearch},{r.K},{lam},{status},{str(r.stable).lower()}"
        )
    return "\n".join(lines) + "\n"


def rows_to_text(rows: Sequence[ExperimentRow]) -> str:
    cols = CSV_HEADER.split(",")
    table = [cols]
    for r in rows:
        lam = "nan" if math.isnan(r.lam) else f"{r.lam:.8g}"
        table.append(
            [r.system, r.basis, f"{r.mu:.8g}", r.k0, str(r.outer), str(r.inner),
             str(r.linesearch), r.K, lam, r.status, str(r.stable).lower()]
        )
    widths = [max(len(row[i]) for row in table) for i in range(len(cols))]
    lines = [
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
        for row in table
    ]
    return "\n".join(lines) + "\n"


def _maybe_load(name: str):
    path = find_instance_file(name)
    return load_instance(path) if path is not None else None


def table1_suite() -> list[tuple[str, object, ExperimentConfig]]:
    """Reference settings mirroring the published comparison table; systems
    without embedded data are loaded from instance files when available."""
    reg = registry()
    targets = reg["targets"]
    mirror = TargetSpec(mode="mirror-shift", shift=-0.5)
    suite: list[tuple[str, object, ExperimentConfig]] = []

    nn1 = reg["systems"]["NN1"]
    suite.append(("NN1", nn1, ExperimentConfig("power", 1e-3, k0=[0.0, 30.0])))
    suite.append(
        ("NN1", nn1, ExperimentConfig("lagrange", 1e-4, k0=[0.0, 30.0], target=mirror))
    )
    ac4 = reg["polys"]["AC4"]
    ac4_solver = SolveConfig(u0=1.0 / 9)
    suite.append(
        ("AC4", ac4, ExperimentConfig("power", 1e-5, k0=[0.0, 0.0], solver=SolveConfig(u0=1.0 / 9)))
    )
    suite.append(
        ("AC4", ac4, ExperimentConfig(
            "lagrange", 1e-5, k0=[0.0, 0.0],
            target=targets["AC4_shifted"], part="re", solver=ac4_solver,
        ))
    )
    nn6 = reg["polys"]["NN6"]
    nn6_solver = SolveConfig(
        p0=0.01, u0=1.0 / 9, sigma=1.0, tol_inner=1e-8, k_bound=1e8, max_outer=150
    )
    suite.append(
        ("NN6", nn6, ExperimentConfig(
            "lagrange", 1e-5, k0=[0.0] * 4, target=targets["NN6_sigma1"],
            solver=nn6_solver,
        ))
    )

    file_rows = [
        ("AC7", "power", 1.0, [0.0, 0.0]),
        ("AC7", "lagrange", 1e-5, [0.0, 0.0]),
        ("AC17", "power", 1.0, [0.0, 0.0]),
        ("AC17", "lagrange", 1.0, [0.0, 0.0]),
        ("REA3", "power", 1e-5, [0.0, 0.0, 0.0]),
        ("REA3", "lagrange", 1e-2, [0.0, 0.0, 0.0]),
        ("UWV", "power", 1.0, [0.0] * 4),
        ("UWV", "lagrange", 1.0, [0.0] * 4),
        ("NN5", "power", 1.0, [10.0, 5.0]),
        ("NN5", "lagrange", 1e-5, [10.0, 5.0]),
        ("HE1", "power", 1.0, [1.0, 1.0]),
        ("HE1", "lagrange", 1e-1, [1.0, 1.0]),
    ]
    for name, basis, mu, k0 in file_rows:
        plant = _maybe_load(name)
        cfg = ExperimentConfig(
            basis, mu, k0=k0, target=mirror if basis == "lagrange" else None
        )
        suite.append((name, plant, cfg))
    return suite


def table2_suite() -> list[tuple[str, object, ExperimentConfig]]:
    """Target-polynomial sweep for the PAS system (file-loaded)."""
    reg = registry()
    targets = reg["targets"]
    plant = _maybe_load("PAS")
    k0 = [0.0, 0.0, 0.0]
    return [
        ("PAS", plant, ExperimentConfig("power", 1e-3, k0=k0)),
        ("PAS", plant, ExperimentConfig(
            "lagrange", 1e-8, k0=k0, target=targets["PAS_sigma1"])),
        ("PAS", plant, ExperimentConfig(
            "lagrange", 1e-5, k0=k0, target=targets["PAS_sigma2"])),
        ("PAS", plant, ExperimentConfig(
            "lagrange", 1e-2, k0=k0, target=targets["PAS_sigma3"])),
    ]
