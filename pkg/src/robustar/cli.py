"""Command-line interface: ``robustar fit | simulate | examples``."""
import argparse
import csv
import json
import math
import sys
from importlib import resources

import numpy as np

from .exceptions import FitError, RobustARError
from .model import RegressionDataset
from .simulation import StudyDesign, run_study
from .solver import SolverConfig, fit

EXIT_OK, EXIT_INPUT, EXIT_NOT_CONVERGED = 0, 1, 2
EXAMPLES = ("boxoffice", "belgium")


class InputError(RobustARError):
    pass


def read_csv_columns(source, columns, label="<input>"):
    """Read named numeric columns from a headed CSV.

    Blank lines are skipped; any other unparsable cell is an error that
    names the line.
    """
    reader = csv.reader(source)
    header, rows = None, []
    for lineno, row in enumerate(reader, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if header is None:
            header = [cell.strip() for cell in row]
            missing = [c for c in columns if c not in header]
            if missing:
                raise InputError(f"{label}:{lineno}: missing column(s) {', '.join(missing)}; "
                                 f"header has {', '.join(header)}")
            idx = [header.index(c) for c in columns]
            continue
        if len(row) != len(header):
            raise InputError(f"{label}:{lineno}: expected {len(header)} fields, got {len(row)}")
        values = []
        for c, i in zip(columns, idx):
            cell = row[i].strip()
            try:
                v = float(cell)
            except ValueError:
                raise InputError(f"{label}:{lineno}: column {c!r}: "
                                 f"non-numeric value {cell!r}") from None
            if not math.isfinite(v):
                raise InputError(f"{label}:{lineno}: column {c!r}: non-finite value {cell!r}")
            values.append(v)
        rows.append(values)
    if header is None:
        raise InputError(f"{label}: empty file, expected a header row")
    if not rows:
        raise InputError(f"{label}: no data rows")
    arr = np.array(rows, dtype=np.float64)
    return {c: arr[:, j] for j, c in enumerate(columns)}


def load_dataset(path, response, covariates, intercept):
    if response in covariates:
        raise InputError(f"response column {response!r} is also listed as a covariate")
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            cols = read_csv_columns(fh, [response, *covariates], label=str(path))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    X = np.column_stack([cols[c] for c in covariates])
    return RegressionDataset.from_arrays(cols[response], X, intercept=intercept,
                                         names=tuple(covariates))


def fit_report(request, result):
    """JSON-ready report document for one fit."""
    return {
        "request": request,
        "estimates": result.estimates(),
        "loglik": float(result.loglik),
        "aic": float(result.aic),
        "bic": float(result.bic),
        "iterations": int(result.iterations),
        "converged": bool(result.converged),
        "stationary": bool(result.stationary),
        "warnings": list(result.warnings),
    }


def dumps(doc):
    return json.dumps(doc, indent=2) + "\n"


def format_human(doc):
    req = doc["request"]
    dist = "normal" if req["distribution"] == "normal" else f"t (nu={req['df']:g})"
    lines = [f"AR({req['ar_order']}) regression, {dist} innovations",
             f"{'parameter':<12}{'estimate':>12}{'SE':>12}{'CI lower':>12}{'CI upper':>12}"]
    for est in doc["estimates"]:
        lines.append(f"{est['name']:<12}{est['value']:>12.4f}{est['se']:>12.4f}"
                     f"{est['ci_lower']:>12.4f}{est['ci_upper']:>12.4f}")
    lines.append(f"log-likelihood {doc['loglik']:.4f}   AIC {doc['aic']:.4f}   BIC {doc['bic']:.4f}")
    lines.append(f"iterations {doc['iterations']}   converged {doc['converged']}   "
                 f"stationary {doc['stationary']}")
    lines.extend(f"warning: {w}" for w in doc["warnings"])
    return "\n".join(lines) + "\n"


def format_tsv(doc):
    lines = ["name\tvalue\tse\tci_lower\tci_upper"]
    for est in doc["estimates"]:
        lines.append("\t".join([est["name"]] + [repr(est[k]) for k in
                                                ("value", "se", "ci_lower", "ci_upper")]))
    for key in ("loglik", "aic", "bic", "iterations", "converged", "stationary"):
        lines.append(f"# {key}\t{doc[key]}")
    return "\n".join(lines) + "\n"


FORMATTERS = {"json": dumps, "human": format_human, "tsv": format_tsv}


def _csv_list(text, cast=str):
    items = [s.strip() for s in text.split(",") if s.strip()]
    return [cast(s) for s in items]


def cmd_fit(args, out):
    covariates = _csv_list(args.covariates)
    if not covariates and not args.intercept:
        raise InputError("no covariates given and --intercept not set")
    if not covariates:
        raise InputError("--covariates must name at least one column")
    data = load_dataset(args.input, args.response, covariates, args.intercept)
    cfg = SolverConfig(distribution=args.dist, nu=args.df, p=args.ar_order, tol=args.tol,
                       max_iter=args.max_iter, level=args.level)
    if data.N <= data.M + cfg.p:
        raise InputError(f"need more than M + p = {data.M + cfg.p} rows, got {data.N}")
    result = fit(data, cfg)
    request = {
        "input": str(args.input), "response": args.response, "covariates": covariates,
        "intercept": bool(args.intercept), "ar_order": cfg.p, "distribution": cfg.distribution,
        "df": cfg.nu, "tol": cfg.tol, "max_iter": cfg.max_iter, "level": cfg.level,
    }
    doc = fit_report(request, result)
    out.write(FORMATTERS[args.format](doc))
    if not result.stationary:
        print("warning: estimated AR coefficients are not stationary", file=sys.stderr)
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def design_from_args(args):
    if args.design:
        with open(args.design, encoding="utf-8") as fh:
            base = json.load(fh)
        base = base.get("design", base)
    else:
        base = {}
    if args.n is not None:
        base["n"] = args.n
    if args.reps is not None:
        base["reps"] = args.reps
    if args.beta is not None:
        base["true_beta"] = _csv_list(args.beta, float)
    if args.phi is not None:
        base["true_phi"] = _csv_list(args.phi, float)
    inno = dict(base.get("innovation") or {})
    if args.innovation is not None:
        inno["kind"] = args.innovation
    inno.setdefault("kind", "normal")
    if args.df is not None:
        inno["nu"] = args.df
    if args.kappa is not None:
        inno["kappa"] = args.kappa
    base["innovation"] = inno
    if args.contaminate is not None:
        base["contamination"] = args.contaminate
    if args.outlier_sd is not None:
        base["outlier_sd"] = args.outlier_sd
    if args.estimators is not None:
        base["estimators"] = ["t" if e in ("student_t", "t") else e
                              for e in _csv_list(args.estimators)]
    if args.fit_df is not None:
        base["fit_nu"] = args.fit_df
    if args.seed is not None:
        base["seed"] = args.seed
    return StudyDesign.from_dict(base)


def cmd_simulate(args, out):
    try:
        design = design_from_args(args)
    except (OSError, TypeError, KeyError, json.JSONDecodeError) as exc:
        raise InputError(f"invalid design: {exc}") from None
    report = run_study(design, workers=args.workers)
    if args.out:
        with open(f"{args.out}.tsv", "w", encoding="utf-8") as fh:
            fh.write(report.to_tsv())
        with open(f"{args.out}.json", "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    if args.format == "json":
        out.write(report.to_json())
    elif args.format == "tsv":
        out.write(report.to_tsv())
    else:
        out.write(report.format_table())
    return EXIT_OK


def _fixture(name):
    return resources.files("robustar").joinpath("data", f"{name}.csv")


def example_fits(name, max_iter=500, nu=3.0):
    """Run a bundled example; returns ``[(label, report_doc), ...]``."""
    if name not in EXAMPLES:
        raise InputError(f"unknown example {name!r}; valid names: {', '.join(EXAMPLES)}")
    path = _fixture(name)
    with path.open(newline="", encoding="utf-8") as fh:
        if name == "belgium":
            cols = read_csv_columns(fh, ["year", "calls"], label=f"{name}.csv")
            variants = [("year, intercept",
                         RegressionDataset.from_arrays(cols["calls"], cols["year"], intercept=True,
                                                       names=("year",)), True, ["year"])]
        else:
            cols = read_csv_columns(fh, ["year", "gross"], label=f"{name}.csv")
            index = np.arange(1.0, cols["year"].shape[0] + 1.0)
            variants = [
                ("year index 1..N, no intercept",
                 RegressionDataset(cols["gross"], index[:, None], names=("year_index",)),
                 False, ["year_index"]),
                ("raw year, no intercept",
                 RegressionDataset(cols["gross"], cols["year"][:, None], names=("year",)),
                 False, ["year"]),
            ]
    fits = []
    for label, data, intercept, covs in variants:
        for dist in ("normal", "t"):
            cfg = SolverConfig(distribution=dist, nu=nu, p=1, max_iter=max_iter)
            result = fit(data, cfg)
            request = {"input": f"examples/{name}", "response": name, "covariates": covs,
                       "intercept": intercept, "ar_order": 1, "distribution": dist,
                       "df": nu, "tol": cfg.tol, "max_iter": max_iter, "level": cfg.level,
                       "encoding": label}
            fits.append((label, fit_report(request, result)))
    return fits


def format_comparison(name, fits):
    """Side-by-side normal vs t table per covariate encoding."""
    lines = []
    labels = list(dict.fromkeys(label for label, _ in fits))
    for label in labels:
        docs = {doc["request"]["distribution"]: doc for lab, doc in fits if lab == label}
        lines.append(f"{name}: {label}, AR(1)")
        lines.append(f"{'':<12}{'':<8}{'Normal':>24}{'t':>24}")
        names = [e["name"] for e in docs["normal"]["estimates"]]
        for i, pname in enumerate(names):
            n_est, t_est = docs["normal"]["estimates"][i], docs["t"]["estimates"][i]
            lines.append(f"{pname:<12}{'est':<8}{n_est['value']:>24.4f}{t_est['value']:>24.4f}")
            lines.append(f"{'':<12}{'SE':<8}{n_est['se']:>24.4f}{t_est['se']:>24.4f}")
            ci = [f"({e['ci_lower']:.4f}, {e['ci_upper']:.4f})" for e in (n_est, t_est)]
            lines.append(f"{'':<12}{'95% CI':<8}{ci[0]:>24}{ci[1]:>24}")
        for key in ("aic", "bic", "loglik"):
            lines.append(f"{key.upper() if key != 'loglik' else 'logLik':<20}"
                         f"{docs['normal'][key]:>24.4f}{docs['t'][key]:>24.4f}")
        for dist in ("normal", "t"):
            for w in docs[dist]["warnings"]:
                lines.append(f"warning ({dist}): {w}")
        lines.append("")
    return "\n".join(lines)


def cmd_examples(args, out):
    fits = example_fits(args.name, max_iter=args.max_iter)
    if args.format == "json":
        out.write(dumps({"example": args.name,
                         "fits": [doc for _, doc in fits]}))
    else:
        out.write(format_comparison(args.name, fits))
    return EXIT_OK if all(doc["converged"] for _, doc in fits) else EXIT_NOT_CONVERGED


class _Parser(argparse.ArgumentParser):
    # usage errors share the input-error exit code; 2 means "not converged"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(
        prog="robustar",
        description="Regression with AR(p) errors under normal or Student-t innovations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a model to a CSV file")
    p.add_argument("--input", required=True)
    p.add_argument("--response", required=True)
    p.add_argument("--covariates", required=True, help="comma-separated column names")
    p.add_argument("--intercept", action="store_true")
    p.add_argument("--ar-order", type=int, required=True)
    p.add_argument("--dist", choices=("normal", "t"), default="normal")
    p.add_argument("--df", type=float, default=3.0, help="t degrees of freedom (fixed)")
    p.add_argument("--tol", type=float, default=SolverConfig.tol)
    p.add_argument("--max-iter", type=int, default=SolverConfig.max_iter)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--format", choices=tuple(FORMATTERS), default="human")
    p.set_defaults(func=cmd_fit)

    s = sub.add_parser("simulate", help="run a Monte Carlo study",
                       description="Negative lists need '=': --phi=-0.7,0.12")
    s.add_argument("--design", help="JSON design file (flags override its fields)")
    s.add_argument("--n", type=int)
    s.add_argument("--reps", type=int)
    s.add_argument("--beta")
    s.add_argument("--phi")
    s.add_argument("--innovation", choices=("normal", "t", "pareto", "gpd"))
    s.add_argument("--df", type=float, help="innovation t degrees of freedom")
    s.add_argument("--kappa", type=float, help="Pareto tail index / GPD shape")
    s.add_argument("--contaminate", type=float, help="fraction of y replaced by outliers")
    s.add_argument("--outlier-sd", type=float)
    s.add_argument("--estimators", help="comma-separated subset of normal,t")
    s.add_argument("--fit-df", type=float, help="degrees of freedom of the t estimator")
    s.add_argument("--seed", type=int)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", help="write OUT.tsv and OUT.json")
    s.add_argument("--format", choices=("human", "json", "tsv"), default="human")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("examples", help="run a bundled data example")
    e.add_argument("name")
    e.add_argument("--max-iter", type=int, default=SolverConfig.max_iter)
    e.add_argument("--format", choices=("human", "json"), default="human")
    e.set_defaults(func=cmd_examples)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except (InputError, FitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
