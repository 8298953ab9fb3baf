"""Diagnosis pipeline, sphere surveys, great-circle path probes and report I/O.

Randomness comes from Philox counter-based generators.  Sample ``i`` of a
survey with seed ``s`` uses the key ``(s, i)``, so a sample does not depend
on how many others are drawn or on which worker draws it.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import tolerances as tol
from .cones import normal_cone, strict_complementarity
from .criticality import CriticalityReport, quadratic_decay, sensitivity, strong_criticality
from .errors import ConvergenceError, InputError, TameOptError
from .identify import ProbeOptions, check_partial_smoothness, extract_manifold, signature
from .solver import SolverOptions, maximize_linear

CONDITIONS = ("solve", "LICQ", "normal_cone_continuity", "sharpness",
              "strict_complementarity", "quadratic_decay_M", "uniqueness")
CSV_COLUMNS_TAIL = ("verdict", "failing_condition", "active_signature", "delta_hat", "t_star", "dim_M")


def sample_sphere(n, count, seed):
    """``count`` uniform unit vectors in R^n; sample ``i`` is drawn from Philox key ``(seed, i)``."""
    if n < 1 or count < 1:
        raise InputError("need n >= 1 and count >= 1")
    if seed < 0:
        raise InputError("seed must be nonnegative")
    out = np.empty((count, n))
    for i in range(count):
        rng = np.random.Generator(np.random.Philox(key=np.array([seed, i], dtype=np.uint64)))
        while True:
            z = rng.standard_normal(n)
            nrm = np.linalg.norm(z)
            if nrm >= 1e-8:
                break
        out[i] = z / nrm
    return out


@dataclass(frozen=True)
class DiagnoseOptions:
    solver: SolverOptions = SolverOptions()
    probe: ProbeOptions = ProbeOptions()
    decay_radius: float | None = None  # default R / 4
    decay_count: int = 200
    seed: int = 0
    sensitivity: bool = False
    h: float = 1e-4


@dataclass
class DiagnosisReport:
    c: list
    overall: str = "inconclusive"
    failing_condition: str | None = None
    error: str | None = None
    solve: object = None
    manifold: object = None
    ps: object = None
    crit: CriticalityReport | None = None
    decay: CriticalityReport | None = None
    sens: object = None
    signature: str | None = None

    @property
    def dim_M(self):
        return None if self.manifold is None else self.manifold.dim

    @property
    def x(self):
        return None if self.solve is None else self.solve.x

    def to_dict(self):
        return {
            "schema": tol.SCHEMA,
            "kind": "diagnosis",
            "c": list(self.c),
            "overall": self.overall,
            "failing_condition": self.failing_condition,
            "error": self.error,
            "signature": self.signature,
            "dim_M": self.dim_M,
            "solve": None if self.solve is None else self.solve.summary(),
            "manifold": None if self.manifold is None else self.manifold.summary(),
            "ps": None if self.ps is None else self.ps.summary(),
            "crit": None if self.crit is None else self.crit.summary(),
            "decay": None if self.decay is None else self.decay.summary(),
            "sens": None if self.sens is None else self.sens.summary(),
        }

    def row(self, index=0):
        t = None if self.crit is None else self.crit.t_star
        d = None if self.decay is None else self.decay.delta_hat
        return {
            "index": index,
            "c": [float(v) for v in self.c],
            "verdict": self.overall,
            "failing_condition": self.failing_condition,
            "active_signature": self.signature,
            "delta_hat": None if d is None else float(d),
            "t_star": None if t is None or np.isnan(t) else float(t),
            "dim_M": self.dim_M,
        }


def _first_failure(ps, crit, decay):
    if not ps.cond_i:
        return "LICQ"
    if not ps.cond_ii:
        return "normal_cone_continuity"
    if not ps.cond_iii:
        return "sharpness"
    if crit.strict_comp != "interior":
        return "strict_complementarity"
    if crit.delta_hat is not None and not crit.delta_hat > tol.DELTA_TOL:
        return "quadratic_decay_M"
    if not decay.delta_hat > tol.DELTA_TOL:
        return "uniqueness"
    return None


def diagnose(body, c, opts=None):
    """Full identifiability pipeline for the unit direction of ``c``.

    solve, active manifold, partial smoothness, strong criticality along the
    manifold, and global quadratic decay as the uniqueness certificate.
    Stage errors give ``overall = "inconclusive"`` with the stage name.
    """
    opts = opts or DiagnoseOptions()
    c = np.asarray(c, dtype=float)
    if c.shape != (body.n,) or not np.linalg.norm(c) > 0:
        raise InputError(f"c must be a nonzero vector of length {body.n}")
    c = c / np.linalg.norm(c)
    rep = DiagnosisReport(c=c.tolist())
    stage = "solve"
    try:
        rep.solve = maximize_linear(body, c, opts.solver)
        if not rep.solve.converged:
            raise ConvergenceError("barrier centering did not converge within max_newton_iters")
        stage = "LICQ"
        rep.manifold = m = extract_manifold(body, rep.solve)
        stage = "normal_cone_continuity"
        rep.ps = ps = check_partial_smoothness(body, m, opts.probe)
        rep.signature = signature(m, ps)
        stage = "strict_complementarity"
        if m.licq:
            rep.crit = strong_criticality(body, rep.solve, m, seed=opts.seed)
        else:
            verdict, t = strict_complementarity(normal_cone(body, rep.solve.x, m.active), c)
            rep.crit = CriticalityReport(strict_comp=verdict, t_star=t, strong=False)
        stage = "uniqueness"
        radius = 0.25 * body.radius if opts.decay_radius is None else opts.decay_radius
        rep.decay = quadratic_decay(body, rep.solve, radius, opts.decay_count, opts.seed)
    except TameOptError as exc:
        rep.overall, rep.failing_condition, rep.error = "inconclusive", stage, str(exc)
        return rep
    if ps.status == "inconclusive":
        rep.overall, rep.failing_condition = "inconclusive", "normal_cone_continuity"
        return rep
    fail = _first_failure(ps, rep.crit, rep.decay)
    rep.overall = "identifiable" if fail is None else "not_identifiable"
    rep.failing_condition = fail
    if opts.sensitivity and fail is None:
        try:
            rep.sens = sensitivity(body, c, m, opts.h, result=rep.solve, opts=opts.solver, crit=rep.crit)
        except TameOptError as exc:
            rep.error = f"sensitivity: {exc}"
    return rep


# -- surveys ----------------------------------------------------------------------

@dataclass
class SurveyStats:
    body: str | None
    seed: int
    total: int
    identifiable: int
    inconclusive: int
    failures: list  # dicts: index, c, failing_condition
    failure_counts: dict
    census: dict
    rows: list = field(default_factory=list)

    @property
    def identifiable_fraction(self):
        return self.identifiable / self.total

    def to_dict(self):
        d = asdict(self)
        d = {"schema": tol.SCHEMA, "kind": "survey", **d}
        return d


def _survey_chunk(args):
    body, dirs, start, opts = args
    return [diagnose(body, c, opts).row(start + k) for k, c in enumerate(dirs)]


def survey(body, count, seed, opts=None, workers=1):
    """Diagnose ``count`` seeded directions and aggregate verdicts.

    ``workers > 1`` runs chunks in worker processes; the result is identical
    to the serial run.
    """
    if count < 1:
        raise InputError("count must be at least 1")
    opts = opts or DiagnoseOptions()
    dirs = sample_sphere(body.n, count, seed)
    if workers <= 1:
        rows = _survey_chunk((body, dirs, 0, opts))
    else:
        size = -(-count // (4 * workers))
        jobs = [(body, dirs[s:s + size], s, opts) for s in range(0, count, size)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = [r for chunk in ex.map(_survey_chunk, jobs) for r in chunk]
    return aggregate(rows, seed, body.name)


def aggregate(rows, seed, name=None):
    rows = sorted(rows, key=lambda r: r["index"])
    failures, counts, census = [], {}, {}
    ident = inconc = 0
    for r in rows:
        if r["verdict"] == "identifiable":
            ident += 1
        elif r["verdict"] == "inconclusive":
            inconc += 1
        else:
            failures.append({"index": r["index"], "c": r["c"], "failing_condition": r["failing_condition"]})
        if r["verdict"] != "identifiable":
            k = r["failing_condition"]
            counts[k] = counts.get(k, 0) + 1
        if r["active_signature"] is not None:
            census[r["active_signature"]] = census.get(r["active_signature"], 0) + 1
    return SurveyStats(body=name, seed=seed, total=len(rows), identifiable=ident, inconclusive=inconc,
                       failures=failures, failure_counts=dict(sorted(counts.items())),
                       census=dict(sorted(census.items())), rows=rows)


# -- path probes ------------------------------------------------------------------

@dataclass
class PathPoint:
    theta: float
    c: list
    verdict: str
    signature: str | None
    x: list | None
    delta_hat: float | None
    error: str | None = None


@dataclass
class PathProbe:
    points: list
    changes: list  # dicts: from_index, to_index, from_signature, to_signature, jump

    def to_dict(self):
        return {"schema": tol.SCHEMA, "kind": "path_probe",
                "points": [asdict(p) for p in self.points], "changes": self.changes}


def slerp(a, b, t):
    a = np.asarray(a, float) / np.linalg.norm(a)
    b = np.asarray(b, float) / np.linalg.norm(b)
    omega = np.arccos(np.clip(a @ b, -1.0, 1.0))
    return (np.sin((1 - t) * omega) * a + np.sin(t * omega) * b) / np.sin(omega)


def path_probe(body, c_from, c_to, steps, opts=None):
    """Diagnose ``steps`` equally spaced directions on the great circle from ``c_from`` to ``c_to``.

    A signature change is recorded between consecutive identifiable points,
    together with the jump of the maximizer.
    """
    a = np.asarray(c_from, float)
    b = np.asarray(c_to, float)
    if steps < 2:
        raise InputError("steps must be at least 2")
    if a.shape != (body.n,) or b.shape != (body.n,):
        raise InputError("endpoints must match the body dimension")
    cosang = abs(a @ b) / (np.linalg.norm(a) * np.linalg.norm(b))
    if cosang > 1 - 1e-12:
        raise InputError("endpoints must not be parallel or antipodal")
    points = []
    for k in range(steps):
        t = k / (steps - 1)
        c = slerp(a, b, t)
        rep = diagnose(body, c, opts)
        d = None if rep.decay is None else rep.decay.delta_hat
        points.append(PathPoint(theta=float(t), c=c.tolist(), verdict=rep.overall, signature=rep.signature,
                                x=None if rep.solve is None else rep.solve.x.tolist(),
                                delta_hat=d, error=rep.error))
    changes = []
    last = None
    for k, p in enumerate(points):
        if p.verdict != "identifiable":
            continue
        if last is not None and points[last].signature != p.signature:
            changes.append({"from_index": last, "to_index": k,
                            "from_signature": points[last].signature, "to_signature": p.signature,
                            "jump": float(np.linalg.norm(np.subtract(p.x, points[last].x)))})
        last = k
    return PathProbe(points, changes)


# -- report I/O ---------------------------------------------------------------------

def _csv_rows(rows, n):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", *[f"c{j + 1}" for j in range(n)], *CSV_COLUMNS_TAIL])
    for r in rows:
        w.writerow([r["index"], *[repr(v) for v in r["c"]], r["verdict"],
                    r["failing_condition"] or "", r["active_signature"] or "",
                    "" if r["delta_hat"] is None else repr(r["delta_hat"]),
                    "" if r["t_star"] is None else repr(r["t_star"]),
                    "" if r["dim_M"] is None else r["dim_M"]])
    return buf.getvalue()


def emit_report(report, fmt="json"):
    """Serialize a :class:`DiagnosisReport`, :class:`SurveyStats` or :class:`PathProbe`.

    JSON documents carry ``"schema": "tame-opt-lab/1"``.  CSV has one row per
    sample with columns ``index, c1..cn, verdict, failing_condition,
    active_signature, delta_hat, t_star, dim_M``.
    """
    if fmt not in ("json", "csv"):
        raise InputError(f"unknown format {fmt!r}")
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2)
    if isinstance(report, SurveyStats):
        n = len(report.rows[0]["c"]) if report.rows else 0
        return _csv_rows(report.rows, n)
    if isinstance(report, DiagnosisReport):
        return _csv_rows([report.row(0)], len(report.c))
    raise InputError("CSV output is available for diagnosis and survey reports")


def parse_report(document):
    """Inverse of the JSON branch of :func:`emit_report` for surveys; other kinds come back as dicts."""
    d = json.loads(document)
    if d.get("schema") != tol.SCHEMA:
        raise InputError(f"unsupported schema {d.get('schema')!r}")
    if d.get("kind") == "survey":
        d = {k: v for k, v in d.items() if k not in ("schema", "kind")}
        return SurveyStats(**d)
    return d


def parse_csv(document):
    """Rows of a survey CSV as dicts with typed values."""
    rows = []
    for rec in csv.DictReader(io.StringIO(document)):
        cs = sorted((k for k in rec if k.startswith("c") and k[1:].isdigit()), key=lambda k: int(k[1:]))
        rows.append({
            "index": int(rec["index"]),
            "c": [float(rec[k]) for k in cs],
            "verdict": rec["verdict"],
            "failing_condition": rec["failing_condition"] or None,
            "active_signature": rec["active_signature"] or None,
            "delta_hat": float(rec["delta_hat"]) if rec["delta_hat"] else None,
            "t_star": float(rec["t_star"]) if rec["t_star"] else None,
            "dim_M": int(rec["dim_M"]) if rec["dim_M"] else None,
        })
    return rows
