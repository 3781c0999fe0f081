"""Experiment drivers behind the command-line interface.

Every random quantity comes from a seed derived from the master seed and the
position of the cell in the experiment (grid index, replication, DGP index),
so cells are independent of each other and of evaluation order. Output files
are written only after all cells have finished.
"""
import math
import os
import warnings
import zlib
from dataclasses import dataclass, field

import numpy as np

from .config import ExperimentConfig
from .distortion import Kind, Mode
from .errors import ConfigError, DistSensError, IngestionError, InsufficientSampleError
from .io import ensure_dir, ingest_csv, write_csv, write_json
from .models import Exponential
from .posterior import sample_posterior
from .sensitivity import GFunction, SensitivityReport, clt_interval, estimate_delta

# Values printed next to computed tables. They come from a published study
# whose priors and sampler settings are unknown, so they are context for the
# reader and never used as test oracles.
REFERENCE_LABEL = "reference (not oracle)"
REFERENCE_TABLES = {
    50: {
        "gamma(1, 1)": {"gamma": (-0.99, -0.25), "lognormal": (-1.17, 0.47), "exponential": (0.56,)},
        "lognormal(0, 1)": {"gamma": (-1.19, -0.30), "lognormal": (-0.80, 0.26), "exponential": (0.56,)},
        "exponential(1)": {"gamma": (-0.79, -0.22), "lognormal": (-1.42, 0.52), "exponential": (0.62,)},
    },
    200: {
        "gamma(1, 1)": {"gamma": (-0.87, -0.21), "lognormal": (-1.15, 0.50), "exponential": (0.61,)},
        "lognormal(0, 1)": {"gamma": (-1.13, -0.18), "lognormal": (-0.85, 0.29), "exponential": (0.39,)},
        "exponential(1)": {"gamma": (-0.99, -0.28), "lognormal": (-1.07, 0.41), "exponential": (0.66,)},
    },
}
REFERENCE_DATASETS = {
    "windshield": {"gamma": (-3.80, -0.97), "lognormal": (-0.58, 0.28), "exponential": (0.25,)},
    "earthquake": {"gamma": (-0.60, -0.21), "lognormal": (-1.66, 0.70), "exponential": (0.83,)},
}


def derive_seed(master, *keys):
    """A 32-bit seed determined by the master seed and a path of keys.

    String keys are hashed with CRC-32 so the mapping does not depend on
    Python's per-process string hashing.
    """
    ints = [int(master)]
    for k in keys:
        ints.append(zlib.crc32(k.encode()) if isinstance(k, str) else int(k))
    return int(np.random.SeedSequence(ints).generate_state(1)[0])


def _describe_dist(model, params):
    return f"{model.name}({', '.join(_num(p) for p in params)})"


def _num(v):
    v = float(v)
    return str(int(v)) if v == int(v) else repr(v)


def _f(v):
    v = float(v)
    return repr(v) if math.isfinite(v) else ""


@dataclass
class ExperimentResult:
    kind: str
    out_dir: str
    files: list
    summary: dict = field(default_factory=dict)


# ---------------------------------------------------------------- converge


def run_converge(config: ExperimentConfig):
    """Sensitivity of the exponential rate across a grid of sample sizes."""
    if len(config.dgps) != 1 or not isinstance(config.dgps[0][0], Exponential):
        raise ConfigError("converge needs a single exponential DGP, e.g. dgp = exponential(0.5)")
    if config.family.kind is not Kind.POWER_SURVIVAL:
        raise ConfigError("converge uses the power-survival family")
    if not config.n_grid:
        raise ConfigError("converge needs a non-empty n grid")
    dgp, (theta0,) = config.dgps[0]
    model = Exponential()
    prior = config.prior_for(model)
    g = GFunction.component(1)

    rows = []
    for i, n in enumerate(config.n_grid):
        data = model.simulate((theta0,), n, derive_seed(config.seed, "converge", "data", i))
        draws = sample_posterior(model, prior, data, config.M,
                                 derive_seed(config.seed, "converge", "posterior", i), config.sampler)
        rep = estimate_delta(draws, model, prior, data, config.family, g, Mode.LIKELIHOOD)
        theta_hat = float(draws.draws[:, 0].mean())
        ci = clt_interval(rep.delta[0], theta_hat, n)
        rows.append({
            "n": n,
            "delta": _f(rep.delta[0]),
            "ci_lo": _f(ci.lo),
            "ci_hi": _f(ci.hi),
            "std_error": _f(rep.std_error[0]),
            "theta_hat": _f(theta_hat),
            "reference": _f(-theta0),
        })

    out = ensure_dir(config.out)
    csv_path = os.path.join(out, "converge.csv")
    json_path = os.path.join(out, "converge.json")
    write_csv(csv_path, ("n", "delta", "ci_lo", "ci_hi", "std_error", "theta_hat", "reference"), rows)
    summary = {
        "experiment": "converge",
        "dgp": _describe_dist(dgp, (theta0,)),
        "family": config.family.name,
        "M": config.M,
        "seed": config.seed,
        "reference": -float(theta0),
        "rows": [{k: (float(v) if k != "n" else v) for k, v in r.items()} for r in rows],
    }
    write_json(json_path, summary)
    return ExperimentResult("converge", out, [csv_path, json_path], summary)


# ------------------------------------------------------------ model select


@dataclass(frozen=True)
class TableCell:
    dgp: str
    fitted_model: str
    delta_per_parameter: tuple
    avg_abs_delta: float
    std_error: tuple = ()
    warnings: tuple = ()
    error: str = None

    @classmethod
    def from_report(cls, dgp, fitted_model, report, warns=()):
        d = tuple(float(v) for v in report.delta)
        return cls(dgp, fitted_model, d, float(np.mean(np.abs(d))),
                   tuple(float(v) for v in report.std_error), tuple(warns))

    @classmethod
    def failed(cls, dgp, fitted_model, k, message, warns=()):
        return cls(dgp, fitted_model, (math.nan,) * k, math.nan, (math.nan,) * k, tuple(warns), message)


def estimate_cell(model, prior, data, family, M, seed, sampler, g=None, mode=Mode.LIKELIHOOD):
    """Sample, estimate and collect warnings for one table cell.

    Library errors and sampler warnings are returned rather than raised so a
    single bad cell does not abort a whole table.
    """
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            draws = sample_posterior(model, prior, data, M, seed, sampler)
            report = estimate_delta(draws, model, prior, data, family, g, mode)
            error = None
        except DistSensError as exc:
            report, error = None, f"{type(exc).__name__}: {exc}"
    msgs = tuple(str(w.message) for w in caught)
    return report, error, msgs


def run_model_select(config: ExperimentConfig):
    """Fit every model to data from every DGP and tabulate the sensitivities."""
    if not config.models:
        raise ConfigError("model-select needs at least one fitted model")
    if not config.dgps:
        raise ConfigError("model-select needs at least one DGP")
    if not config.n_grid:
        raise ConfigError("model-select needs a non-empty n grid")

    cells = []  # (n, replication, TableCell)
    for a, n in enumerate(config.n_grid):
        for r in range(config.replications):
            for i, (dgp, params) in enumerate(config.dgps):
                label = _describe_dist(dgp, params)
                data = dgp.simulate(params, n, derive_seed(config.seed, "model-select", "data", a, r, i))
                for j, model in enumerate(config.models):
                    seed = derive_seed(config.seed, "model-select", "posterior", a, r, i, j)
                    report, error, msgs = estimate_cell(
                        model, config.prior_for(model), data, config.family, config.M, seed, config.sampler, config.g)
                    if report is None:
                        cells.append((n, r, TableCell.failed(label, model.name, model.k, error, msgs)))
                    else:
                        cells.append((n, r, TableCell.from_report(label, model.name, report, msgs)))

    out = ensure_dir(config.out)
    rows = []
    for n, r, c in cells:
        for q, d in enumerate(c.delta_per_parameter):
            rows.append({
                "n": n, "replication": r, "dgp": c.dgp, "fitted_model": c.fitted_model,
                "component": q + 1, "delta": _f(d),
                "std_error": _f(c.std_error[q]) if c.std_error else "",
                "avg_abs_delta": _f(c.avg_abs_delta),
                "warnings": " | ".join(c.warnings), "error": c.error or "",
            })
    csv_path = os.path.join(out, "model_select.csv")
    write_csv(csv_path, ("n", "replication", "dgp", "fitted_model", "component", "delta",
                         "std_error", "avg_abs_delta", "warnings", "error"), rows)

    files = [csv_path]
    tables = {}
    for n in config.n_grid:
        text = format_table([c for nn, r, c in cells if nn == n and r == 0], n, config.models)
        tables[n] = text
        path = os.path.join(out, f"model_select_n{n}.txt")
        with open(path, "w") as fh:
            fh.write(text)
        files.append(path)

    summary = {
        "experiment": "model-select",
        "family": getattr(config.family, "name", repr(config.family)),
        "M": config.M,
        "seed": config.seed,
        "n_grid": list(config.n_grid),
        "replications": config.replications,
        "cells": [
            {"n": n, "replication": r, "dgp": c.dgp, "fitted_model": c.fitted_model,
             "delta": [None if math.isnan(d) else d for d in c.delta_per_parameter],
             "avg_abs_delta": None if math.isnan(c.avg_abs_delta) else c.avg_abs_delta,
             "warnings": list(c.warnings), "error": c.error}
            for n, r, c in cells
        ],
    }
    json_path = os.path.join(out, "model_select.json")
    write_json(json_path, summary)
    files.append(json_path)
    result = ExperimentResult("model-select", out, files, summary)
    result.cells = cells
    result.tables = tables
    return result


def _cell_text(values):
    vals = [("nan" if math.isnan(v) else f"{v:.2f}") for v in values]
    return vals[0] if len(vals) == 1 else "(" + ", ".join(vals) + ")"


def format_table(cells, n, models):
    """Plain-text table: one row per DGP, one column per fitted model.

    Below each computed row the published values (where known) are shown
    under an explicit label so nobody mistakes them for a check.
    """
    names = [m.name for m in models]
    dgps = list(dict.fromkeys(c.dgp for c in cells))
    lookup = {(c.dgp, c.fitted_model): c for c in cells}
    ref = REFERENCE_TABLES.get(n, {})
    head = ["DGP \\ fit"] + names
    lines = []
    for dgp in dgps:
        row = [dgp]
        for name in names:
            c = lookup.get((dgp, name))
            row.append("-" if c is None else (_cell_text(c.delta_per_parameter) + (" !" if c.error else "")))
        lines.append(row)
        if dgp in ref:
            lines.append([f"  {REFERENCE_LABEL}"] + [_cell_text(ref[dgp][nm]) if nm in ref[dgp] else "-" for nm in names])
    widths = [max(len(r[q]) for r in [head] + lines) for q in range(len(head))]
    fmt = lambda r: "  ".join(s.ljust(w) for s, w in zip(r, widths)).rstrip()
    body = [f"local sensitivity, n = {n}", fmt(head), fmt(["-" * w for w in widths])] + [fmt(r) for r in lines]
    return "\n".join(body) + "\n"


# ------------------------------------------------------------------ report


def _load_dataset(config):
    if not config.data_path:
        raise ConfigError(f"{config.experiment} needs a dataset path ([data] path = ...)")
    return ingest_csv(config.data_path, config.column, config.units)


def _check_positive(model, data):
    bad = model.check_support(data.values)
    if len(bad):
        rows = [int(i) + 1 for i in bad]
        raise IngestionError(
            f"{model.name} needs positive observations; non-positive values in data rows {rows[:20]}"
            + (" ..." if len(rows) > 20 else ""),
            rows,
        )


def run_report(config: ExperimentConfig):
    """Fit each model to a dataset, report sensitivities and plot data."""
    if not config.models:
        raise ConfigError("report needs at least one fitted model")
    data = _load_dataset(config)
    if data.n < 2:
        raise InsufficientSampleError(f"report needs at least 2 observations, got {data.n}")
    for model in config.models:
        _check_positive(model, data)

    name = os.path.splitext(os.path.basename(config.data_path))[0]
    out = ensure_dir(config.out)
    files, table_rows, reports, means = [], [], {}, {}
    for j, model in enumerate(config.models):
        prior = config.prior_for(model)
        draws = sample_posterior(model, prior, data, config.M, derive_seed(config.seed, "report", j), config.sampler)
        rep = estimate_delta(draws, model, prior, data, config.family, config.g, config.mode)
        reports[model.name] = rep
        means[model.name] = draws.draws.mean(axis=0)
        path = os.path.join(out, f"report_{model.name}.json")
        payload = rep.to_dict()
        payload.update({"dataset": name, "fitted_model": model.name,
                        "posterior_mean": [float(v) for v in means[model.name]],
                        "sampler": draws.metadata()})
        write_json(path, payload)
        files.append(path)
        ref = REFERENCE_DATASETS.get(name.lower(), {}).get(model.name)
        table_rows.append({
            "dataset": name,
            "fitted_model": model.name,
            "delta": " ".join(_f(d) for d in rep.delta),
            "std_error": " ".join(_f(s) for s in rep.std_error),
            "avg_abs_delta": _f(np.mean(np.abs(rep.delta))),
            "reference_not_oracle": "" if ref is None else " ".join(repr(v) for v in ref),
        })

    table_path = os.path.join(out, "table.csv")
    write_csv(table_path, ("dataset", "fitted_model", "delta", "std_error", "avg_abs_delta",
                           "reference_not_oracle"), table_rows)
    files.append(table_path)

    plot = plot_data(data, config.models, means)
    plot_path = os.path.join(out, "plot_data.json")
    write_json(plot_path, plot)
    files.append(plot_path)
    density_path = os.path.join(out, "fitted_density.csv")
    write_csv(density_path, ["x"] + [m.name for m in config.models],
              ({"x": _f(x), **{m.name: _f(plot["density"][m.name][q]) for m in config.models}}
               for q, x in enumerate(plot["x"])))
    files.append(density_path)

    summary = {
        "experiment": "report",
        "dataset": name,
        "n": data.n,
        "seed": config.seed,
        "reports": {k: v.to_dict() for k, v in reports.items()},
    }
    result = ExperimentResult("report", out, files, summary)
    result.reports = reports
    return result


def plot_data(data, models, means, n_grid=200):
    """Histogram of the data and each fitted density at the posterior mean."""
    x = data.values
    counts, edges = np.histogram(x, bins="auto", density=True)
    hi = float(x.max()) * 1.05
    lo = 0.0 if all(m.support_lower == 0.0 for m in models) else float(x.min()) - 0.05 * abs(float(x.min()))
    grid = np.linspace(lo, hi, n_grid)
    if lo == 0.0:
        grid[0] = hi / (20.0 * n_grid)  # avoid the boundary where some densities blow up
    dens = {}
    for m in models:
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            dens[m.name] = [float(v) if math.isfinite(v) else None for v in m.pdf(means[m.name], grid)]
    return {
        "histogram": {"edges": [float(e) for e in edges], "density": [float(c) for c in counts]},
        "x": [float(v) for v in grid],
        "density": dens,
        "posterior_mean": {k: [float(v) for v in means[k]] for k in dens},
    }


# ------------------------------------------------------------- sensitivity


def run_sensitivity(config: ExperimentConfig):
    """One sensitivity estimate for the first configured model.

    Data come from ``[data] path`` when given, otherwise from the first DGP
    at the first sample size of the grid.
    """
    if not config.models:
        raise ConfigError("sensitivity needs a model")
    model = config.models[0]
    if config.data_path:
        data = _load_dataset(config)
    elif config.dgps and config.n_grid:
        dgp, params = config.dgps[0]
        data = dgp.simulate(params, config.n_grid[0], derive_seed(config.seed, "sensitivity", "data"))
    else:
        raise ConfigError("sensitivity needs either [data] path or a dgp with n")
    if model.support_lower == 0.0:
        _check_positive(model, data)
    prior = config.prior_for(model)
    draws = sample_posterior(model, prior, data, config.M, derive_seed(config.seed, "sensitivity", "posterior"),
                             config.sampler)
    rep = estimate_delta(draws, model, prior, data, config.family, config.g, config.mode)
    out = ensure_dir(config.out)
    payload = rep.to_dict()
    payload.update({"fitted_model": model.name, "sampler": draws.metadata()})
    json_path = os.path.join(out, "sensitivity.json")
    write_json(json_path, payload)
    csv_path = os.path.join(out, "sensitivity.csv")
    write_csv(csv_path, SensitivityReport.CSV_FIELDS, rep.csv_rows())
    result = ExperimentResult("sensitivity", out, [json_path, csv_path], payload)
    result.report = rep
    return result


RUNNERS = {
    "converge": run_converge,
    "model-select": run_model_select,
    "report": run_report,
    "sensitivity": run_sensitivity,
}


def run(config: ExperimentConfig):
    return RUNNERS[config.experiment](config)
