"""Monte Carlo study engine: data generation, contamination, aggregation.

Every replicate ``r`` draws from its own generator seeded by
``SeedSequence(seed, spawn_key=(r,))``, so results do not depend on the
order (or process) in which replicates run.
"""
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .exceptions import RobustARError
from .model import ARSpec, RegressionDataset, check_stationarity
from .solver import SolverConfig, fit

INNOVATION_KINDS = ("normal", "t", "pareto", "gpd", "zero")
BURN_IN = 200
REPORT_COLUMNS = ("estimate", "bias", "mse", "se", "cil", "ciu")


@dataclass(frozen=True)
class Innovation:
    """Innovation law.

    ``pareto`` is a sign-randomised Pareto with minimum 1 and tail index
    ``kappa``; ``gpd`` is a sign-randomised generalized Pareto with shape
    ``kappa`` (tail index ``1/kappa``). ``zero`` is a degenerate law for
    noiseless tests.
    """

    kind: str = "normal"
    nu: float = 3.0
    kappa: float = 1.25
    scale: float = 1.0

    def __post_init__(self):
        kind = {"student_t": "t", "symmetric_pareto": "pareto",
                "symmetric_gpd": "gpd"}.get(self.kind, self.kind)
        object.__setattr__(self, "kind", kind)
        if kind not in INNOVATION_KINDS:
            raise ValueError(f"unknown innovation law {self.kind!r}")
        if kind == "t" and not self.nu > 0:
            raise ValueError("t innovations need nu > 0")
        if kind in ("pareto", "gpd") and not self.kappa > 0:
            raise ValueError("Pareto innovations need kappa > 0")
        if not self.scale >= 0:
            raise ValueError("innovation scale must be non-negative")

    @property
    def infinite_variance(self):
        return ((self.kind == "t" and self.nu <= 2)
                or (self.kind == "pareto" and self.kappa <= 2)
                or (self.kind == "gpd" and self.kappa >= 0.5))

    def label(self):
        if self.kind == "t":
            return f"student_t(nu={self.nu:g})"
        if self.kind == "pareto":
            return f"symmetric_pareto(kappa={self.kappa:g})"
        if self.kind == "gpd":
            return f"symmetric_gpd(shape={self.kappa:g})"
        return self.kind


@dataclass(frozen=True)
class StudyDesign:
    n: int = 100
    reps: int = 100
    true_beta: tuple = (0.1, 0.5, 0.9)
    true_phi: tuple = (-0.7, 0.12)
    innovation: Innovation = field(default_factory=Innovation)
    contamination: float = 0.0
    outlier_sd: float = 100.0
    estimators: tuple = ("normal", "t")
    fit_nu: float = 3.0
    seed: int = 12345

    def __post_init__(self):
        object.__setattr__(self, "true_beta", tuple(float(b) for b in self.true_beta))
        object.__setattr__(self, "true_phi", tuple(float(f) for f in self.true_phi))
        object.__setattr__(self, "estimators", tuple(self.estimators))
        if isinstance(self.innovation, dict):
            object.__setattr__(self, "innovation", Innovation(**self.innovation))
        if not check_stationarity(ARSpec(self.true_phi)):
            raise ValueError(f"true AR coefficients {self.true_phi} are not stationary")
        if not 0.0 <= self.contamination < 1.0:
            raise ValueError(f"contamination fraction must lie in [0, 1), got {self.contamination}")
        if self.n <= len(self.true_beta) + len(self.true_phi):
            raise ValueError("sample size too small for the number of parameters")
        if self.reps < 1:
            raise ValueError("need at least one replication")
        if not self.true_beta:
            raise ValueError("need at least one regression coefficient")
        for est in self.estimators:
            SolverConfig(distribution=est)

    @property
    def p(self):
        return len(self.true_phi)

    @property
    def param_names(self):
        return (tuple(f"beta_{i + 1}" for i in range(len(self.true_beta)))
                + tuple(f"phi_{l + 1}" for l in range(self.p)) + ("sigma",))

    @property
    def truth(self):
        return np.array(self.true_beta + self.true_phi + (self.innovation.scale,))

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "innovation" in d and isinstance(d["innovation"], dict):
            d["innovation"] = Innovation(**d["innovation"])
        return cls(**d)


def replicate_rng(seed, r):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(r,)))


def draw_innovation(law, rng, size=None):
    """Draw from ``law``: standard normal, standard t, or sign-randomised Pareto.

    The Pareto draw is ``S * P`` with ``P`` Pareto(minimum 1, tail index kappa)
    and ``S`` an independent fair random sign; the ``gpd`` draw replaces ``P``
    by a generalized Pareto variable ``(U**-kappa - 1) / kappa``.
    """
    if law.kind == "normal":
        a = rng.standard_normal(size)
    elif law.kind == "t":
        a = rng.standard_t(law.nu, size)
    elif law.kind == "pareto":
        # numpy's pareto is Lomax (minimum 0)
        mag = 1.0 + rng.pareto(law.kappa, size)
        sign = np.where(rng.random(size) < 0.5, -1.0, 1.0)
        a = sign * mag
    elif law.kind == "gpd":
        u = 1.0 - rng.random(size)
        mag = np.expm1(-law.kappa * np.log(u)) / law.kappa
        sign = np.where(rng.random(size) < 0.5, -1.0, 1.0)
        a = sign * mag
    else:
        a = np.zeros(size) if size is not None else 0.0
    return law.scale * a


def ar_errors(phi, innovations, burn_in=BURN_IN):
    """Run ``e_t = sum_j phi_j e_{t-j} + a_t`` from zero presample, dropping ``burn_in``."""
    phi = np.asarray(phi, dtype=np.float64)
    a = np.asarray(innovations, dtype=np.float64)
    p = phi.shape[0]
    e = np.zeros(a.shape[0] + p)
    for t in range(a.shape[0]):
        acc = a[t]
        for j in range(1, p + 1):
            acc += phi[j - 1] * e[p + t - j]
        e[p + t] = acc
    return e[p + burn_in:]


def generate_dataset(design, rng):
    """Simulate covariates, AR errors and response (uncontaminated)."""
    n, m = design.n, len(design.true_beta)
    X = rng.standard_normal((n, m))
    a = draw_innovation(design.innovation, rng, n + BURN_IN)
    e = ar_errors(design.true_phi, a)
    y = X @ np.asarray(design.true_beta) + e
    return RegressionDataset(y, X)


def contaminate(y, fraction, rng, sd=100.0):
    """Replace ``floor(fraction * N)`` responses with ``N(0, sd**2)`` draws."""
    if not 0.0 <= fraction < 1.0:
        raise ValueError(f"contamination fraction must lie in [0, 1), got {fraction}")
    y = np.array(y, dtype=np.float64, copy=True)
    k = int(math.floor(fraction * y.shape[0]))
    if k == 0:
        return y
    idx = rng.choice(y.shape[0], size=k, replace=False)
    y[idx] = rng.normal(0.0, sd, size=k)
    return y


@dataclass
class ReplicateRecord:
    index: int
    estimates: dict = field(default_factory=dict)
    se: dict = field(default_factory=dict)
    ci: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)


def run_replicate(design, r):
    rng = replicate_rng(design.seed, r)
    data = generate_dataset(design, rng)
    if design.contamination > 0:
        data = RegressionDataset(contaminate(data.y, design.contamination, rng, design.outlier_sd),
                                 data.X)
    rec = ReplicateRecord(index=r)
    for est in design.estimators:
        cfg = SolverConfig(distribution=est, nu=design.fit_nu, p=design.p)
        try:
            res = fit(data, cfg)
        except (RobustARError, ValueError, np.linalg.LinAlgError) as exc:
            rec.failures[est] = str(exc)
            continue
        if not res.converged:
            rec.failures[est] = "did not converge"
            continue
        rec.estimates[est] = res.point_estimates()
        rec.se[est] = res.se
        rec.ci[est] = np.array([[iv.lower, iv.upper] for iv in res.ci])
    return rec


@dataclass(frozen=True)
class ReportRow:
    estimator: str
    parameter: str
    true: float
    estimate: float
    bias: float
    mse: float
    se: float
    cil: float
    ciu: float
    n_ok: int


@dataclass
class StudyReport:
    design: StudyDesign
    rows: list
    failures: dict
    metadata: dict

    def row(self, estimator, parameter):
        for row in self.rows:
            if row.estimator == estimator and row.parameter == parameter:
                return row
        raise KeyError((estimator, parameter))

    def to_tsv(self):
        head = ["estimator", "parameter", "true", *REPORT_COLUMNS]
        lines = ["\t".join(head)]
        for row in self.rows:
            vals = [row.true, row.estimate, row.bias, row.mse, row.se, row.cil, row.ciu]
            lines.append("\t".join([row.estimator, row.parameter] + [repr(float(v)) for v in vals]))
        return "\n".join(lines) + "\n"

    def to_dict(self):
        return {
            "design": self.design.to_dict(),
            "metadata": self.metadata,
            "failures": self.failures,
            "rows": [asdict(row) for row in self.rows],
        }

    def to_json(self):
        return json.dumps(_jsonable(self.to_dict()), indent=2, allow_nan=True) + "\n"

    def format_table(self):
        """Rows grouped by parameter, one column per estimator."""
        ests = list(self.design.estimators)
        out = [f"n={self.design.n}  R={self.design.reps}  innovation="
               f"{self.metadata['innovation']}  contamination="
               f"{self.metadata['contamination']}"]
        if self.metadata.get("infinite_variance"):
            out.append("note: innovation law has infinite variance")
        out.append(f"{'param':<8}{'stat':<6}" + "".join(f"{e:>14}" for e in ests))
        for name in self.design.param_names:
            for stat in REPORT_COLUMNS:
                cells = []
                for est in ests:
                    try:
                        cells.append(f"{getattr(self.row(est, name), stat):>14.4f}")
                    except KeyError:
                        cells.append(f"{'-':>14}")
                out.append(f"{name:<8}{stat:<6}" + "".join(cells))
        for est, count in self.failures.items():
            if count:
                out.append(f"{est}: {count} failed replication(s) excluded")
        return "\n".join(out) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def aggregate(design, records):
    """Reduce replicate records to bias/MSE/mean-SE/mean-CI rows.

    Records are reduced in replicate-index order regardless of input order.
    """
    records = sorted(records, key=lambda rec: rec.index)
    truth = design.truth
    rows, failures = [], {}
    for est in design.estimators:
        ok = [rec for rec in records if est in rec.estimates]
        failures[est] = len(records) - len(ok)
        if not ok:
            continue
        est_mat = np.array([rec.estimates[est] for rec in ok])
        se_mat = np.array([rec.se[est] for rec in ok])
        ci_mat = np.array([rec.ci[est] for rec in ok])
        mean = est_mat.mean(axis=0)
        bias = mean - truth
        mse = ((est_mat - truth) ** 2).mean(axis=0)
        with np.errstate(invalid="ignore"):
            se = _nanmean(se_mat)
            cil = _nanmean(ci_mat[:, :, 0])
            ciu = _nanmean(ci_mat[:, :, 1])
        for j, name in enumerate(design.param_names):
            rows.append(ReportRow(est, name, float(truth[j]), float(mean[j]), float(bias[j]),
                                  float(mse[j]), float(se[j]), float(cil[j]), float(ciu[j]),
                                  len(ok)))
    metadata = {
        "n": design.n,
        "reps": design.reps,
        "seed": design.seed,
        "innovation": design.innovation.label(),
        "infinite_variance": design.innovation.infinite_variance,
        "contamination": design.contamination,
        "outlier_law": f"N(0, sd={design.outlier_sd:g})" if design.contamination else None,
        "failure_messages": {
            est: sorted({rec.failures[est] for rec in records if est in rec.failures})
            for est in design.estimators
        },
    }
    return StudyReport(design=design, rows=rows, failures=failures, metadata=metadata)


def _nanmean(a):
    # all-NaN columns stay NaN without a RuntimeWarning
    a = np.asarray(a, dtype=np.float64)
    cnt = np.sum(np.isfinite(a), axis=0)
    tot = np.nansum(a, axis=0)
    return np.where(cnt > 0, tot / np.maximum(cnt, 1), np.nan)


def _run_one(args):
    return run_replicate(*args)


def run_study(design, workers=1):
    """Run all replications, optionally across ``workers`` processes."""
    jobs = [(design, r) for r in range(design.reps)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_one, jobs, chunksize=max(1, design.reps // (4 * workers))))
    else:
        records = [_run_one(job) for job in jobs]
    return aggregate(design, records)
