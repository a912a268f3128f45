"""Command-line front end.

Every subcommand writes a JSON report (``--output`` or stdout) and, with
``--plot-dir``, CSV plot data named after the figure it feeds. Exit codes:
0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

import argparse
import os
import sys
import time

import numpy as np

from . import __version__, io
from .copulas import (CopulaFit, CopulaSpec, copula_fit, copula_sample, copula_select, copula_tau,
                      parse_family)
from .errors import DataError, NumericalError, WindcopError
from .joint import build_joint, default_grid, gof, grid_data, joint_sample
from .marginals import KINDS as MARGINAL_KINDS
from .marginals import compare_fits, cullen_frey
from .preprocess import (apply_scale, chisq_qq, correlation_matrix, eliminate_collinear, minmax_scale,
                         prune_high_correlation, train_test_split)
from .regression import KINDS as REGRESSION_KINDS
from .regression import fit as fit_regression
from .regression import metrics, predict
from .stats_core import describe, kendall_tau, pobs, spearman

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- argument helpers ---------------------------------------------------------

def _seed(text):
    if text == "auto":
        return "auto"
    try:
        s = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be a non-negative integer or 'auto', got {text!r}") from None
    if s < 0:
        raise argparse.ArgumentTypeError(f"seed must be non-negative, got {s}")
    return s


def _positive_int(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {n}")
    return n


def _resolve_seed(args, ctx):
    if args.seed is None:
        raise UsageError(f"{args.command}: --seed is required (an integer, or 'auto' to draw and record one)")
    if args.seed == "auto":
        args.seed = int(np.random.SeedSequence().entropy % (2 ** 32))
    ctx["seed"] = args.seed
    return args.seed


def _existing(path, what="input"):
    if not os.path.isfile(path):
        raise UsageError(f"{what} file not found: {path}")
    return path


class Context(dict):
    """Report under construction: inputs are digested, outputs collected."""

    def __init__(self, args):
        super().__init__(tool_version=__version__, command=args.command, seed=None, inputs={}, results={})
        self.args = args
        self.plots = []
        self.t0 = time.perf_counter()

    def add_input(self, path, what="input"):
        _existing(path, what)
        self["inputs"][what] = {"path": path, "sha256": io.file_digest(path)}
        return path

    def plot(self, name, header, rows):
        self.plots.append((name, header, rows))


def _load(ctx, path, what="input", response=None, drop_bad_rows=None):
    ctx.add_input(path, what)
    a = ctx.args
    load = io.read_csv(path, drop_bad_rows=a.drop_bad_rows if drop_bad_rows is None else drop_bad_rows,
                       max_speed=getattr(a, "max_speed", None), speed_columns=getattr(a, "speed_columns", None),
                       response=response)
    if load.dropped or load.filtered:
        ctx["results"].setdefault("ingestion", {})[what] = {
            "dropped_rows": [{"line": ln, "reason": r} for ln, r in load.dropped],
            "filtered_by_max_speed": load.filtered, "rows_used": load.dataset.n_rows}
    return load.dataset


def _pairs(ctx, path, columns=None, what="input"):
    ds = _load(ctx, path, what)
    cols = columns or ds.columns[:2]
    if len(cols) != 2:
        raise UsageError("--columns takes exactly two names")
    if ds.values.shape[1] < 2:
        raise DataError(f"{path}: need two columns for pairs, found {ds.values.shape[1]}")
    return np.column_stack([ds.column(cols[0]), ds.column(cols[1])]), tuple(cols)


def _spec_from_args(args):
    fam, rot = parse_family(args.family)
    return CopulaSpec(fam, args.theta, args.delta, rot)


# -- subcommands --------------------------------------------------------------

def cmd_describe(args, ctx):
    ds = _load(ctx, args.input)
    cols = args.columns or ds.columns
    ctx["results"]["describe"] = {c: describe(ds.column(c)).to_dict() for c in cols}
    if len(cols) >= 2:
        sub = ds.select(cols)
        ctx["results"]["correlation"] = {"method": args.method, "columns": list(cols),
                                         "matrix": correlation_matrix(sub, args.method)}


def cmd_preprocess(args, ctx):
    ds = _load(ctx, args.input, response=args.response)
    res = ctx["results"]
    res["columns_in"] = list(ds.columns)
    ds, prune_log = prune_high_correlation(ds, args.corr_threshold, args.method)
    res["correlation_pruning"] = [{"removed": r, "kept": k, "abs_corr": c} for r, k, c in prune_log]
    if len(ds.predictors) >= 2:
        ds, rep = eliminate_collinear(ds, args.vif_threshold)
        res["vif"] = dict(rep.values)
        res["vif_removed"] = [{"column": c, "vif": v} for c, v in rep.removal_log]
        res["vif_stopped_early"] = rep.stopped_early
    res["columns_out"] = list(ds.columns)
    qq = chisq_qq(ds.select(ds.predictors)) if len(ds.predictors) >= 1 else None
    if qq is not None:
        res["chisq_qq_slope"] = qq.slope()
        ctx.plot("fig05_chisq_qq", ["theoretical", "observed"], zip(qq.theoretical, qq.observed))
    if args.scale:
        ds, params = minmax_scale(ds)
        res["scaler"] = params.to_dict()
    if args.write_data:
        io.write_csv(args.write_data, ds.columns, ds.values)
        res["data_out"] = args.write_data


def cmd_split(args, ctx):
    seed = _resolve_seed(args, ctx)
    ds = _load(ctx, args.input)
    split = train_test_split(ds.n_rows, args.test_fraction, seed)
    io.write_csv(args.train_out, ds.columns, ds.take(split.train).values)
    io.write_csv(args.test_out, ds.columns, ds.take(split.test).values)
    ctx["results"]["split"] = {"n_train": int(split.train.size), "n_test": int(split.test.size),
                               "test_fraction": args.test_fraction, "train_out": args.train_out,
                               "test_out": args.test_out}


def _base_params(kind, args):
    hp = {}
    if kind in ("ridge", "lasso") and args.lam is not None:
        hp["lambda"] = args.lam
    if kind == "huber" and args.delta is not None:
        hp["delta"] = args.delta
    return hp


def _hyperparams(args):
    if args.kind == "bagging":
        return {"base": args.base, "base_params": _base_params(args.base, args), "b": args.b}
    return _base_params(args.kind, args)


def cmd_train(args, ctx):
    seed = _resolve_seed(args, ctx) if args.kind == "bagging" else None
    ds = _load(ctx, args.input, response=args.response)
    predictors = tuple(args.predictors) if args.predictors else ds.predictors
    scaler = None
    if args.scale:
        ds, scaler = minmax_scale(ds, predictors)
    X, y = ds.select(predictors).values, ds.y()
    model = fit_regression(args.kind, X, y, _hyperparams(args), seed)
    model.column_names = predictors
    model.scaler = scaler
    yhat = predict(model, X)
    m = metrics(y, yhat)
    ctx["results"]["model"] = {"kind": model.kind, "intercept": model.intercept,
                               "coefficients": dict(zip(predictors, map(float, model.coefficients))),
                               "hyperparams": model.hyperparams, "iterations": model.iterations,
                               "converged": model.converged}
    ctx["results"]["train_metrics"] = m.to_dict()
    ctx.plot("fig13_train_prediction", ["y", "yhat", "residual"], zip(y, yhat, y - yhat))
    io.write_json(args.model_out, io.model_document(model, __version__, {"response": args.response}))
    ctx["results"]["model_out"] = args.model_out


def cmd_evaluate(args, ctx):
    if bool(args.pred) == bool(args.model):
        raise UsageError("evaluate: give either --pred FILE or --model FILE with --input FILE")
    if args.pred:
        ds = _load(ctx, args.pred, "pred")
        for c in (args.true_col, args.pred_col):
            if c not in ds.columns:
                raise DataError(f"{args.pred}: column {c!r} not found; columns are {list(ds.columns)}")
        y, yhat = ds.column(args.true_col), ds.column(args.pred_col)
    else:
        if not args.input:
            raise UsageError("evaluate: --model needs --input")
        model, doc = io.load_model(ctx.add_input(args.model, "model"), ("regression",))
        response = doc.get("response")
        ds = _load(ctx, args.input, response=response)
        missing = [c for c in model.column_names if c not in ds.columns]
        if missing:
            raise DataError(f"{args.input}: model predictors {missing} missing; columns are {list(ds.columns)}")
        if model.scaler is not None:
            ds = apply_scale(ds, model.scaler)
        y, yhat = ds.y(), predict(model, ds.select(model.column_names).values)
    m = metrics(y, yhat, args.r2_denominator)
    ctx["results"]["metrics"] = m.to_dict()
    ctx.plot("fig13_prediction", ["y", "yhat", "residual"], zip(y, yhat, y - yhat))


def cmd_fit_marginal(args, ctx):
    ds = _load(ctx, args.input)
    col = args.column or ds.columns[0]
    x = ds.column(col)
    comp = compare_fits(x, args.kinds)
    best = comp.best()
    ctx["results"]["column"] = col
    ctx["results"]["fits"] = [f.to_dict() for f in comp.rows]
    ctx["results"]["failures"] = comp.failures
    ctx["results"]["best"] = best.kind
    pd = comp.plot_data()
    kinds = list(pd["kinds"])
    ctx.plot(f"fig17_density_cdf_{col}", ["x"] + [f"{k}_{s}" for k in kinds for s in ("pdf", "cdf")],
             (tuple([g] + [pd["kinds"][k][s][i] for k in kinds for s in ("density", "cdf")])
              for i, g in enumerate(pd["grid"])))
    ctx.plot(f"fig17_qq_pp_{col}", ["observed", "position"] + [f"{k}_{s}" for k in kinds for s in ("qq", "pp")],
             (tuple([pd["sorted"][i], pd["positions"][i]]
                    + [pd["kinds"][k][s][i] for k in kinds for s in ("qq_theoretical", "pp_fitted")])
              for i in range(pd["sorted"].size)))
    if args.model_out:
        io.write_json(args.model_out, io.model_document(best, __version__, {"column": col}))
        ctx["results"]["model_out"] = args.model_out


def cmd_cullen_frey(args, ctx):
    seed = _resolve_seed(args, ctx)
    ds = _load(ctx, args.input)
    col = args.column or ds.columns[0]
    cf = cullen_frey(ds.column(col), args.n_boot, seed)
    ctx["results"].update(column=col, observed={"skewness_sq": cf.observed[0], "kurtosis": cf.observed[1]},
                          n_boot=args.n_boot, reference_points=cf.reference_points)
    rows = [("observed", *cf.observed)] + [("bootstrap", a, b) for a, b in cf.bootstrap_points]
    rows += [(name, a, b) for name, (a, b) in sorted(cf.reference_points.items())]
    for name, curve in sorted(cf.reference_curves.items()):
        rows += [(f"{name}_curve", a, b) for a, b in curve]
    ctx.plot(f"fig16_cullen_frey_{col}", ["series", "skewness_sq", "kurtosis"], rows)


def _pobs_from(args, ctx):
    pairs, cols = _pairs(ctx, args.input, args.columns)
    ctx["results"]["columns"] = list(cols)
    ctx["results"]["n"] = int(pairs.shape[0])
    ctx["results"]["spearman"] = spearman(pairs[:, 0], pairs[:, 1])
    ctx["results"]["kendall_tau"] = kendall_tau(pairs[:, 0], pairs[:, 1])
    return pobs(pairs)


def cmd_fit_copula(args, ctx):
    U = _pobs_from(args, ctx)
    fit = copula_fit(args.family, U, n_starts=args.starts)
    ctx["results"]["fit"] = fit.to_dict()
    if args.model_out:
        io.write_json(args.model_out, io.model_document(fit, __version__))
        ctx["results"]["model_out"] = args.model_out


def cmd_select_copula(args, ctx):
    if args.seed is not None:
        _resolve_seed(args, ctx)
    U = _pobs_from(args, ctx)
    sel = copula_select(U, args.families, args.criterion, n_starts=args.starts)
    ctx["results"].update(criterion=args.criterion, best=sel.best.spec.label, table=sel.table(),
                          failures=sel.failures)
    if args.model_out:
        io.write_json(args.model_out, io.model_document(sel.best, __version__))
        ctx["results"]["model_out"] = args.model_out


def cmd_tau(args, ctx):
    spec = _spec_from_args(args)
    tau = copula_tau(spec)
    ctx["results"].update(spec=spec.to_dict(), tau=tau)
    ctx.stdout_text = f"{tau:.3f}\n"


def _copula_spec_from(args, ctx):
    if args.model:
        obj, _ = io.load_model(ctx.add_input(args.model, "model"), ("copula", "copula_spec"))
        return obj.spec if isinstance(obj, CopulaFit) else obj
    if not args.family:
        raise UsageError("give --family (with --theta/--delta) or --model")
    return _spec_from_args(args)


def cmd_sample_copula(args, ctx):
    seed = _resolve_seed(args, ctx)
    spec = _copula_spec_from(args, ctx)
    uv = copula_sample(spec, args.n, seed)
    io.write_csv(args.out, ["u", "v"], uv)
    ctx["results"].update(spec=spec.to_dict(), n=args.n, out=args.out, sample_kendall_tau=kendall_tau(*uv.T),
                          model_tau=copula_tau(spec))
    ctx.plot("fig23_copula_sample", ["u", "v"], uv)


def cmd_build_joint(args, ctx):
    if args.input:
        pairs, cols = _pairs(ctx, args.input, args.columns)
        margins = []
        for i in range(2):
            comp = compare_fits(pairs[:, i], args.kinds)
            margins.append(comp.best())
        sel = copula_select(pobs(pairs), args.families, args.criterion, n_starts=args.starts)
        cop = sel.best
        ctx["results"]["copula_table"] = sel.table()
        labels = cols
    else:
        if not (args.marginal_1 and args.marginal_2 and args.copula):
            raise UsageError("build-joint: give --input, or all of --marginal-1, --marginal-2 and --copula")
        m1, d1 = io.load_model(ctx.add_input(args.marginal_1, "marginal_1"), ("marginal",))
        m2, d2 = io.load_model(ctx.add_input(args.marginal_2, "marginal_2"), ("marginal",))
        cop, _ = io.load_model(ctx.add_input(args.copula, "copula"), ("copula", "copula_spec"))
        margins = [m1, m2]
        labels = (d1.get("column", "x"), d2.get("column", "y"))
        if labels[0] == labels[1]:
            labels = (f"{labels[0]}_1", f"{labels[1]}_2")
    j = build_joint(margins[0], margins[1], cop, labels)
    ctx["results"]["joint"] = j.to_dict()
    xg, yg = default_grid(j, args.grid)
    ctx.plot("fig24_joint_pdf_cdf", ["x", "y", "pdf", "cdf"], grid_data(j, xg, yg))
    io.write_json(args.model_out, io.model_document(j, __version__))
    ctx["results"]["model_out"] = args.model_out


def _joint_from(args, ctx):
    j, _ = io.load_model(ctx.add_input(args.model, "model"), ("joint",))
    return j


def cmd_sample_joint(args, ctx):
    seed = _resolve_seed(args, ctx)
    j = _joint_from(args, ctx)
    xy = joint_sample(j, args.n, seed)
    io.write_csv(args.out, list(j.labels), xy)
    ctx["results"].update(n=args.n, out=args.out, sample_spearman=spearman(*xy.T))
    ctx.plot("fig26_simulated", list(j.labels), xy)


def _gof(args, ctx):
    seed = _resolve_seed(args, ctx)
    j = _joint_from(args, ctx)
    cols = args.columns or list(j.labels)
    ds = _load(ctx, args.input)
    missing = [c for c in cols if c not in ds.columns]
    if missing:
        raise DataError(f"{args.input}: columns {missing} not found; columns are {list(ds.columns)}")
    real = np.column_stack([ds.column(c) for c in cols])
    return j, real, gof(j, real, args.n_sim, seed)


def _qq_rows(rep):
    (r1, s1), (r2, s2) = rep.qq
    return zip(r1, s1, r2, s2)


def cmd_gof(args, ctx):
    j, real, rep = _gof(args, ctx)
    ctx["results"]["gof"] = rep.to_dict()
    ctx["results"]["within_3se"] = bool(abs(rep.difference) < 3.0 * (rep.se_real + rep.se_sim))
    sim = joint_sample(j, rep.n_sim, ctx["seed"])
    ctx.plot("fig26_real_vs_simulated", ["source", *j.labels],
             [("real", a, b) for a, b in real] + [("simulated", a, b) for a, b in sim])
    ctx.plot("fig27_qq", ["real_1", "sim_1", "real_2", "sim_2"], _qq_rows(rep))


def cmd_qq_data(args, ctx):
    _, _, rep = _gof(args, ctx)
    io.write_csv(args.out, ["real_1", "sim_1", "real_2", "sim_2"], _qq_rows(rep))
    ctx["results"].update(out=args.out, n_real=rep.n_real, n_sim=rep.n_sim)


def _fit_label(fit):
    params = ", ".join(f"{p:.4g}" for p in fit.spec.params) or "0"
    return f"{fit.spec.label} (par = {params}, tau = {round(fit.tau, 2):g})"


def cmd_table4(args, ctx):
    ctx.add_input(args.manifest, "manifest")
    man = io.read_manifest(args.manifest)
    if not man:
        raise UsageError(f"{args.manifest}: manifest lists no pair files")
    base = os.path.dirname(os.path.abspath(args.manifest))
    rows = []
    for name, path in man:
        full = path if os.path.isabs(path) else os.path.join(base, path)
        row = {"pair": name, "path": path}
        try:
            load = io.read_csv(_existing(full, "pair"), drop_bad_rows=args.drop_bad_rows,
                               max_speed=args.max_speed)
            pairs = load.dataset.values[:, :2]
            if load.dataset.values.shape[1] < 2:
                raise DataError(f"{path}: need two columns")
            row["sha256"] = io.file_digest(full)
            row["n"] = int(pairs.shape[0])
            row["spearman"] = spearman(pairs[:, 0], pairs[:, 1])
            U = pobs(pairs)
            sel = copula_select(U, args.families, "aic", n_starts=args.starts)
            fits = sel.ranked
            by_bic = sorted(fits, key=lambda f: (f.bic, f.spec.label))[0]
            row["aic"] = {"selected": _fit_label(sel.best), **sel.best.to_dict()}
            row["bic"] = {"selected": _fit_label(by_bic), **by_bic.to_dict()}
        except (WindcopError, UsageError) as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    ctx["results"]["rows"] = rows
    ctx["results"]["failed"] = sum("error" in r for r in rows)


# -- parser -------------------------------------------------------------------

def _common(p, seed=False, plots=True, ingest=True):
    p.add_argument("-o", "--output", help="report JSON path (default: stdout)")
    p.add_argument("--timings", action="store_true", help="add wall-clock timings to the report (not reproducible)")
    if plots:
        p.add_argument("--plot-dir", help="directory for figure plot-data CSVs")
    if seed:
        p.add_argument("--seed", type=_seed, help="integer seed, or 'auto' to draw one and record it")
    if ingest:
        p.add_argument("--drop-bad-rows", action="store_true", help="skip non-numeric rows instead of failing")
        p.add_argument("--max-speed", type=float, help="drop rows where a speed column exceeds this value")
        p.add_argument("--speed-columns", nargs="+", help="columns checked by --max-speed (default: all)")


def _copula_args(p, required=False):
    p.add_argument("--family", required=required, help="name, survival alias (survival_gumbel) or numeric code")
    p.add_argument("--theta", type=float)
    p.add_argument("--delta", type=float)


def build_parser():
    parser = _Parser(prog="windcop", description="Wind-speed regression and copula dependence modelling.")
    parser.add_argument("--version", action="version", version=f"windcop {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    p = sub.add_parser("describe", help="summary statistics and correlation matrix")
    p.add_argument("--input", required=True)
    p.add_argument("--columns", nargs="+")
    p.add_argument("--method", choices=("spearman", "pearson", "kendall"), default="spearman")
    _common(p, plots=False)

    p = sub.add_parser("preprocess", help="correlation pruning, VIF elimination, normality Q-Q, scaling")
    p.add_argument("--input", required=True)
    p.add_argument("--response", required=True)
    p.add_argument("--corr-threshold", type=float, default=0.9)
    p.add_argument("--method", choices=("spearman", "pearson", "kendall"), default="spearman")
    p.add_argument("--vif-threshold", type=float, default=5.0)
    p.add_argument("--scale", action="store_true", help="min-max scale the surviving predictors")
    p.add_argument("--write-data", help="write the processed dataset to this CSV")
    _common(p)

    p = sub.add_parser("split", help="seeded train/test split")
    p.add_argument("--input", required=True)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--train-out", required=True)
    p.add_argument("--test-out", required=True)
    _common(p, seed=True, plots=False)

    p = sub.add_parser("train", help="fit a regression model")
    p.add_argument("--input", required=True)
    p.add_argument("--response", required=True)
    p.add_argument("--predictors", nargs="+")
    p.add_argument("--kind", choices=REGRESSION_KINDS, default="ols")
    p.add_argument("--lam", type=float, help="ridge/lasso penalty")
    p.add_argument("--delta", type=float, help="Huber threshold")
    p.add_argument("--base", choices=("ols", "ridge", "lasso", "bayes_ridge", "huber"), default="ols")
    p.add_argument("--b", type=_positive_int, default=10, help="bagging members")
    p.add_argument("--scale", action="store_true")
    p.add_argument("--model-out", required=True)
    _common(p, seed=True)

    p = sub.add_parser("evaluate", help="prediction metrics")
    p.add_argument("--pred", help="CSV holding true and predicted columns")
    p.add_argument("--true-col", default="y")
    p.add_argument("--pred-col", default="yhat")
    p.add_argument("--model", help="regression model JSON")
    p.add_argument("--input", help="dataset to predict with --model")
    p.add_argument("--r2-denominator", choices=("true-mean", "pred-mean"), default="true-mean")
    _common(p)

    p = sub.add_parser("fit-marginal", help="fit Weibull/gamma/log-normal marginals")
    p.add_argument("--input", required=True)
    p.add_argument("--column")
    p.add_argument("--kinds", nargs="+", choices=MARGINAL_KINDS, default=list(MARGINAL_KINDS))
    p.add_argument("--model-out", help="write the best fit (lowest BIC)")
    _common(p)

    p = sub.add_parser("cullen-frey", help="skewness-kurtosis diagnostic data")
    p.add_argument("--input", required=True)
    p.add_argument("--column")
    p.add_argument("--n-boot", type=_positive_int, default=500)
    _common(p, seed=True)

    def pair_args(p):
        p.add_argument("--input", required=True)
        p.add_argument("--columns", nargs=2, metavar=("X", "Y"))
        p.add_argument("--starts", type=_positive_int, default=5, help="optimizer starts per family")

    p = sub.add_parser("fit-copula", help="maximum-likelihood fit of one copula family")
    pair_args(p)
    p.add_argument("--family", required=True)
    p.add_argument("--model-out")
    _common(p, plots=False)

    p = sub.add_parser("select-copula", help="fit every family and rank by AIC or BIC")
    pair_args(p)
    p.add_argument("--families", nargs="+")
    p.add_argument("--criterion", choices=("aic", "bic"), default="bic")
    p.add_argument("--model-out")
    _common(p, seed=True, plots=False)

    p = sub.add_parser("tau", help="Kendall tau of a copula; prints three decimals")
    _copula_args(p, required=True)
    _common(p, plots=False, ingest=False)

    p = sub.add_parser("sample-copula", help="draw copula pairs")
    _copula_args(p)
    p.add_argument("--model", help="copula model JSON instead of --family")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--out", required=True)
    _common(p, seed=True, ingest=False)

    p = sub.add_parser("build-joint", help="compose marginals and a copula into a joint model")
    p.add_argument("--input", help="pairs CSV: fit both marginals and select the copula")
    p.add_argument("--columns", nargs=2, metavar=("X", "Y"))
    p.add_argument("--marginal-1")
    p.add_argument("--marginal-2")
    p.add_argument("--copula")
    p.add_argument("--kinds", nargs="+", choices=MARGINAL_KINDS, default=list(MARGINAL_KINDS))
    p.add_argument("--families", nargs="+")
    p.add_argument("--criterion", choices=("aic", "bic"), default="bic")
    p.add_argument("--starts", type=_positive_int, default=5)
    p.add_argument("--grid", type=_positive_int, default=41, help="grid points per axis for plot data")
    p.add_argument("--model-out", required=True)
    _common(p)

    p = sub.add_parser("sample-joint", help="simulate from a joint model")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--out", required=True)
    _common(p, seed=True, ingest=False)

    for name, help_text in (("gof", "compare real data with a simulation"),
                            ("qq-data", "Q-Q pairing of real and simulated margins")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--model", required=True)
        p.add_argument("--input", required=True)
        p.add_argument("--columns", nargs=2, metavar=("X", "Y"))
        p.add_argument("--n-sim", type=_positive_int, help="simulation size (default: number of real pairs)")
        if name == "qq-data":
            p.add_argument("--out", required=True)
        _common(p, seed=True, plots=name == "gof")

    p = sub.add_parser("table4", help="copula selection report over a manifest of pair files")
    p.add_argument("--manifest", required=True, help="CSV with columns name,path")
    p.add_argument("--families", nargs="+")
    p.add_argument("--starts", type=_positive_int, default=5)
    _common(p, plots=False)
    return parser


COMMANDS = {
    "describe": cmd_describe, "preprocess": cmd_preprocess, "split": cmd_split, "train": cmd_train,
    "evaluate": cmd_evaluate, "fit-marginal": cmd_fit_marginal, "cullen-frey": cmd_cullen_frey,
    "fit-copula": cmd_fit_copula, "select-copula": cmd_select_copula, "tau": cmd_tau,
    "sample-copula": cmd_sample_copula, "build-joint": cmd_build_joint, "sample-joint": cmd_sample_joint,
    "gof": cmd_gof, "qq-data": cmd_qq_data, "table4": cmd_table4,
}


def _validate_paths(args):
    for attr in ("input", "pred", "model", "marginal_1", "marginal_2", "copula", "manifest"):
        path = getattr(args, attr, None)
        if path:
            _existing(path, attr.replace("_", "-"))
    if getattr(args, "plot_dir", None) and os.path.exists(args.plot_dir) and not os.path.isdir(args.plot_dir):
        raise UsageError(f"--plot-dir {args.plot_dir} exists and is not a directory")
    for attr in ("output", "model_out", "out", "train_out", "test_out", "write_data"):
        path = getattr(args, attr, None)
        if path:
            parent = os.path.dirname(os.path.abspath(path))
            if not os.path.isdir(parent):
                raise UsageError(f"output directory does not exist: {parent}")


def run(argv=None, stdout=None, stderr=None):
    """Run the CLI and return the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --help and --version
            return int(exc.code or 0)
        if args.command is None:
            parser.print_help(stdout)
            return EXIT_USAGE
        _validate_paths(args)
        ctx = Context(args)
        ctx.stdout_text = None
        COMMANDS[args.command](args, ctx)
        if getattr(args, "plot_dir", None) and ctx.plots:
            os.makedirs(args.plot_dir, exist_ok=True)
            names = []
            for name, header, rows in ctx.plots:
                io.write_csv(os.path.join(args.plot_dir, f"{name}.csv"), header, rows)
                names.append(f"{name}.csv")
            ctx["results"]["plot_files"] = names
        report = {k: v for k, v in ctx.items()}
        if args.timings:
            report["timings"] = {"total_seconds": time.perf_counter() - ctx.t0}
        text = io.dumps(report)
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        if ctx.stdout_text is not None:
            stdout.write(ctx.stdout_text)
        elif not args.output:
            stdout.write(text)
        return EXIT_OK
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=stderr)
        return EXIT_NUMERIC
    except DataError as exc:
        print(f"data error: {exc}", file=stderr)
        return EXIT_DATA
    except WindcopError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
