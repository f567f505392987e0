"""Command-line surface: fit, predict, gof, cv, simulate, validate.

The commands are thin wrappers over the library modules.  Data travel in
two CSV files: ``survival.csv`` with header ``id,time,status,<scalar
names...>`` and ``functional.csv`` in wide format with header
``id,<grid values...>`` whose column names are the (numeric) grid of the
functional covariate; the grid is affinely rescaled to the unit interval
at ingestion and the original range is kept as metadata.  Every file this
module writes is UTF-8 with LF line endings, and CSV floats carry 17
significant digits so they round trip exactly.

Failures are reported as a machine-readable JSON object on stdout with
exit code 1; unknown flags exit 2 with the argparse usage message.
Stochastic commands (``simulate``, ``cv``) require a seed and are
reproducible from it alone.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from .concordance import cv_c_index
from .data import SurvivalDataset, default_tau, validate
from .errors import ErrorFamily, box_cox, logarithmic
from .gof import gof_curve
from .inference import estimate_covariance, functional_band, transformation_band, wald_intervals
from .optimize import FitError, FttmFit, fit
from .params import FttmSpec, RawParams
from .predict import HorizonError, survival_at
from .select import GridSearchError, grid_search
from .simulate import ScenarioConfig, generate, monte_carlo

__all__ = ["main", "load_dataset", "write_dataset", "load_fit"]

SCHEMA_VERSION = 1

# default selection grids for the transformation and coefficient-curve
# degrees
_DEFAULT_N0_GRID = (4, 7, 10, 13)
_DEFAULT_N1_GRID = (3, 5, 7, 9)


class CliError(Exception):
    """A command failed; ``code`` is a stable machine-readable slug."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# formatting and small helpers


def _fmt(value) -> str:
    return "%.17g" % float(value)


def _json_safe(obj):
    """Recursively convert numpy scalars/arrays and map non-finite to None."""
    if isinstance(obj, dict):
        return {key: _json_safe(val) for key, val in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(val) for val in obj]
    if isinstance(obj, np.ndarray):
        return [_json_safe(val) for val in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _emit_json(payload: dict, path: str | None) -> None:
    text = json.dumps(_json_safe(payload), indent=2, allow_nan=False) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def _write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(tok) for tok in str(text).split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _float_list(text: str) -> tuple:
    try:
        return tuple(float(tok) for tok in str(text).split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


# ---------------------------------------------------------------------------
# configuration handling


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        raw = Path(path).read_text(encoding="utf-8")
        config = json.loads(raw)
    except OSError as exc:
        raise CliError("io", f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError("bad-config", f"config file is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise CliError("bad-config", "config file must hold a JSON object")
    return config


def _merged(ns, config: dict, key: str, default=None):
    """Effective option value: command line beats config beats default."""
    value = getattr(ns, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _resolve_threads(ns, config: dict) -> int:
    value = getattr(ns, "threads", None)
    if value is None:
        env = os.environ.get("FTTM_THREADS")
        if env is not None:
            try:
                value = int(env)
            except ValueError as exc:
                raise CliError("bad-config", f"FTTM_THREADS must be an integer, got {env!r}") from exc
    if value is None:
        value = config.get("threads")
    if value is None:
        value = os.cpu_count() or 1
    value = int(value)
    if value < 1:
        raise CliError("bad-config", f"thread count must be positive, got {value}")
    return value


# ---------------------------------------------------------------------------
# dataset files


def _read_rows(path: str, label: str):
    try:
        with open(path, encoding="utf-8", newline="") as handle:
            rows = list(csv.reader(handle))
    except OSError as exc:
        raise CliError("io", f"cannot read {label} file: {exc}") from exc
    if not rows:
        raise CliError("invalid-data", f"{label} file {path} is empty")
    return rows[0], rows[1:]


def _parse_ids(tokens) -> tuple:
    # integer ids stay integers so simulator round trips compare equal
    try:
        return tuple(int(tok) for tok in tokens)
    except ValueError:
        return tuple(str(tok) for tok in tokens)


def _parse_float(token: str, where: str) -> float:
    try:
        return float(token)
    except ValueError as exc:
        raise CliError("invalid-data", f"non-numeric value {token!r} in {where}") from exc


def load_dataset(survival_path: str, functional_path: str):
    """Read the two data files and assemble a dataset.

    Parameters
    ----------
    survival_path : str
        CSV with header ``id,time,status,<scalar names...>``.
    functional_path : str
        Wide CSV with header ``id,<grid values...>``; rows are matched to
        the survival file by id and reordered to its row order.

    Returns
    -------
    (ds, meta) : (SurvivalDataset, dict)
        ``meta`` holds ``scalar_names``, ``grid_range`` (the original
        endpoints before rescaling to [0, 1]), and ``grid_points``.

    Raises
    ------
    CliError
        On unreadable files, missing required columns, non-numeric
        fields, or mismatched ids.
    """
    header, rows = _read_rows(survival_path, "survival")
    required = ("id", "time", "status")
    for pos, name in enumerate(required):
        if len(header) <= pos or header[pos] != name:
            raise CliError(
                "invalid-data",
                f"survival file must start with columns id,time,status; missing column {name!r}",
            )
    names = tuple(header[3:])
    width = len(header)
    ids_raw, y, delta, x = [], [], [], []
    for row in rows:
        if len(row) != width:
            raise CliError("invalid-data", f"survival row has {len(row)} fields, expected {width}")
        ids_raw.append(row[0])
        y.append(_parse_float(row[1], "survival column time"))
        delta.append(_parse_float(row[2], "survival column status"))
        x.append([_parse_float(tok, f"survival column {header[3 + j]!r}") for j, tok in enumerate(row[3:])])
    ids = _parse_ids(ids_raw)
    if len(set(ids)) != len(ids):
        raise CliError("invalid-data", "survival file has duplicate ids")

    fheader, frows = _read_rows(functional_path, "functional")
    if not fheader or fheader[0] != "id":
        raise CliError("invalid-data", "functional file must start with column 'id'")
    if len(fheader) < 2:
        raise CliError("invalid-data", "functional file has no grid columns")
    try:
        grid_raw = np.array([float(tok) for tok in fheader[1:]])
    except ValueError as exc:
        raise CliError(
            "invalid-data", "functional header must hold numeric grid values after 'id'"
        ) from exc
    fids_raw, curves = [], []
    for row in frows:
        if len(row) != len(fheader):
            raise CliError(
                "invalid-data", f"functional row has {len(row)} fields, expected {len(fheader)}"
            )
        fids_raw.append(row[0])
        curves.append([_parse_float(tok, "functional file") for tok in row[1:]])
    fids = _parse_ids(fids_raw)
    lookup = {fid: idx for idx, fid in enumerate(fids)}
    if len(lookup) != len(fids):
        raise CliError("invalid-data", "functional file has duplicate ids")
    missing = [str(i) for i in ids if i not in lookup]
    if missing:
        raise CliError("invalid-data", f"functional file is missing ids: {', '.join(missing[:5])}")
    extra = set(fids) - set(ids)
    if extra:
        raise CliError(
            "invalid-data", f"functional file has unmatched ids: {', '.join(map(str, sorted(extra)[:5]))}"
        )

    lo, hi = float(grid_raw[0]), float(grid_raw[-1])
    if not hi > lo:
        raise CliError("invalid-data", "functional grid endpoints must increase")
    grid = (grid_raw - lo) / (hi - lo)
    xf = np.array([curves[lookup[i]] for i in ids], dtype=float)
    try:
        ds = SurvivalDataset(
            y=np.array(y), delta=np.array(delta), x=np.array(x).reshape(len(y), len(names)),
            xf=xf, grid=grid, ids=ids,
        )
    except ValueError as exc:
        raise CliError("invalid-data", str(exc)) from exc
    meta = {"scalar_names": names, "grid_range": (lo, hi), "grid_points": grid.size}
    return ds, meta


def write_dataset(ds: SurvivalDataset, scalar_names, survival_path, functional_path) -> None:
    """Write a dataset to the two CSV files read by :func:`load_dataset`."""
    names = tuple(scalar_names)
    if len(names) != ds.p:
        raise ValueError(f"need {ds.p} scalar names, got {len(names)}")
    rows = [
        [str(ds.ids[i]), _fmt(ds.y[i]), str(int(ds.delta[i]))] + [_fmt(v) for v in ds.x[i]]
        for i in range(ds.n)
    ]
    _write_csv(survival_path, ["id", "time", "status", *names], rows)
    frows = [[str(ds.ids[i])] + [_fmt(v) for v in ds.xf[i]] for i in range(ds.n)]
    _write_csv(functional_path, ["id"] + [_fmt(g) for g in ds.grid], frows)


# ---------------------------------------------------------------------------
# fit serialization


def _family_dict(error: ErrorFamily) -> dict:
    return {"kind": error.kind, "param": error.param}


def _family_from(payload: dict) -> ErrorFamily:
    kind = payload.get("kind")
    param = payload.get("param")
    if kind == "logarithmic":
        return logarithmic(float(param))
    if kind == "box_cox":
        return box_cox(float(param))
    raise CliError("bad-fit-file", f"unknown error family kind {kind!r}")


def save_fit_json(path, result: FttmFit, meta: dict, selection: dict | None) -> None:
    cov = result.covariance
    est, se, lo, hi = wald_intervals(result)
    scalar = [
        {"name": meta["scalar_names"][j], "est": est[j], "se": se[j], "lo": lo[j], "hi": hi[j]}
        for j in range(result.spec.p)
    ]
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "fit",
        "model": {
            "n0": result.spec.n0,
            "n1": result.spec.n1,
            "family": _family_dict(result.spec.error),
            "tau": result.spec.tau,
            "p": result.spec.p,
            "scalar_names": list(meta["scalar_names"]),
            "grid_range": list(meta["grid_range"]),
            "grid_points": meta["grid_points"],
        },
        "params": {
            "beta": result.params.beta,
            "eta": result.params.eta,
            "theta": result.params.theta,
            "gamma": result.gamma,
        },
        "estimates": {"scalar": scalar},
        "covariance": {
            "ridge": cov.ridge,
            "condition_number": cov.condition_number,
            "pd_repair_applied": cov.pd_repair_applied,
        },
        "fit": {
            "loglik": result.loglik,
            "aic": result.aic,
            "converged": result.converged,
            "n_iter": result.n_iter,
            "grad_max": result.grad_max,
            "n": result.n,
            "n_events": result.n_events,
        },
        "selection": selection,
        "warnings": list(result.warnings),
    }
    _emit_json(payload, path)


def load_fit(path: str) -> tuple[FttmFit, dict]:
    """Rebuild a fitted model from a ``fit.json`` file.

    The covariance summary is not rehydrated; prediction and diagnostics
    only need the point estimates.
    """
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError("io", f"cannot read fit file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError("bad-fit-file", f"fit file is not valid JSON: {exc}") from exc
    try:
        model = payload["model"]
        params = payload["params"]
        spec = FttmSpec(
            n0=int(model["n0"]),
            n1=int(model["n1"]),
            error=_family_from(model["family"]),
            tau=float(model["tau"]),
            p=int(model["p"]),
        )
        raw = RawParams(
            beta=np.array(params["beta"], dtype=float).reshape(spec.p),
            eta=np.array(params["eta"], dtype=float),
            theta=np.array(params["theta"], dtype=float),
        )
        info = payload["fit"]
        result = FttmFit(
            spec=spec,
            params=raw,
            loglik=float(info["loglik"]),
            converged=bool(info["converged"]),
            n_iter=int(info["n_iter"]),
            grad_max=float(info["grad_max"]),
            n=int(info["n"]),
            n_events=int(info["n_events"]),
            scalar_names=tuple(model["scalar_names"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError("bad-fit-file", f"fit file is missing a field or holds a bad value: {exc}") from exc
    return result, {"grid_range": tuple(model.get("grid_range", (0.0, 1.0)))}


# ---------------------------------------------------------------------------
# model configuration shared by fit / cv / simulate


def _wants_grid(ns, config) -> bool:
    return any(
        _merged(ns, config, key) is not None for key in ("grid_n0", "grid_n1", "grid_r")
    )


def _grid_config(ns, config, default_r) -> tuple:
    n0_grid = tuple(_merged(ns, config, "grid_n0", _DEFAULT_N0_GRID))
    n1_grid = tuple(_merged(ns, config, "grid_n1", _DEFAULT_N1_GRID))
    r_grid = tuple(_merged(ns, config, "grid_r", (default_r,)))
    return n0_grid, n1_grid, r_grid


def _single_config(ns, config, ds, default_r):
    n0 = _merged(ns, config, "n0")
    n1 = _merged(ns, config, "n1")
    if n0 is None or n1 is None:
        raise CliError(
            "missing-config",
            "specify --n0 and --n1 for a single fit, or --grid-n0/--grid-n1/--grid-r for selection",
        )
    r = _merged(ns, config, "r", default_r)
    tau = _merged(ns, config, "tau")
    tau = default_tau(ds) if tau is None else float(tau)
    return FttmSpec(int(n0), int(n1), logarithmic(float(r)), tau, p=ds.p)


# ---------------------------------------------------------------------------
# commands


def _cmd_fit(ns) -> int:
    config = _load_config(ns.config)
    threads = _resolve_threads(ns, config)
    ds, meta = load_dataset(ns.survival, ns.functional)
    findings = validate(ds)
    problems = [f for f in findings if f.level == "error"]
    if problems:
        raise CliError("invalid-data", "; ".join(f"{f.code}: {f.message}" for f in problems))

    out_dir = Path(ns.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    selection = None
    table = None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if _wants_grid(ns, config):
            n0_grid, n1_grid, r_grid = _grid_config(ns, config, default_r=0.0)
            tau = _merged(ns, config, "tau")
            result, table = grid_search(
                ds, n0_grid, n1_grid, r_grid,
                tau=None if tau is None else float(tau),
                n_jobs=threads,
            )
            selection = {"n0_grid": list(n0_grid), "n1_grid": list(n1_grid), "r_grid": list(r_grid)}
        else:
            spec = _single_config(ns, config, ds, default_r=0.0)
            result = fit(spec, ds)
        estimate_covariance(result, ds)

    s_grid = np.linspace(0.0, 1.0, 101)
    est, se, lo, hi = functional_band(result, s_grid)
    _write_csv(
        out_dir / "beta_s.csv",
        ["s", "est", "se", "lo", "hi"],
        [[_fmt(s_grid[i]), _fmt(est[i]), _fmt(se[i]), _fmt(lo[i]), _fmt(hi[i])] for i in range(101)],
    )
    t_grid = np.linspace(0.0, result.spec.tau, 101)
    est, se, lo, hi = transformation_band(result, t_grid)
    _write_csv(
        out_dir / "h_curve.csv",
        ["t", "est", "se", "lo", "hi"],
        [[_fmt(t_grid[i]), _fmt(est[i]), _fmt(se[i]), _fmt(lo[i]), _fmt(hi[i])] for i in range(101)],
    )
    if table is not None:
        winner = (result.spec.n0, result.spec.n1, result.spec.error.param)
        _write_csv(
            out_dir / "aic_table.csv",
            ["n0", "n1", "r", "loglik", "aic", "converged", "selected"],
            [
                [
                    str(cell.n0), str(cell.n1), _fmt(cell.r), _fmt(cell.loglik), _fmt(cell.aic),
                    str(int(cell.converged)), str(int((cell.n0, cell.n1, cell.r) == winner)),
                ]
                for cell in table
            ],
        )
    save_fit_json(out_dir / "fit.json", result, meta, selection)

    written = ["fit.json", "beta_s.csv", "h_curve.csv"] + (["aic_table.csv"] if table else [])
    _emit_json(
        {
            "schema_version": SCHEMA_VERSION,
            "command": "fit",
            "out_dir": str(out_dir),
            "written": written,
            "converged": result.converged,
            "aic": result.aic,
            "warnings": list(result.warnings),
        },
        None,
    )
    return 0


def _cmd_predict(ns) -> int:
    config = _load_config(ns.config)
    result, _ = load_fit(ns.fit)
    ds, _ = load_dataset(ns.survival, ns.functional)
    times = _merged(ns, config, "times")
    if times is None:
        times = np.linspace(0.0, result.spec.tau, 101)
    times = np.asarray(tuple(times), dtype=float)
    surv = survival_at(result, ds.x, ds.xf, ds.grid, times)
    surv = np.atleast_2d(surv)
    header = ["t"] + [f"S_hat_{i}" for i in ds.ids]
    rows = [
        [_fmt(times[j])] + [_fmt(surv[i, j]) for i in range(ds.n)] for j in range(times.size)
    ]
    _write_csv(ns.out, header, rows)
    _emit_json(
        {"schema_version": SCHEMA_VERSION, "command": "predict", "written": [str(ns.out)],
         "n_profiles": ds.n, "n_times": int(times.size)},
        None,
    )
    return 0


def _cmd_gof(ns) -> int:
    result, _ = load_fit(ns.fit)
    ds, _ = load_dataset(ns.survival, ns.functional)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        u, lam, lo, hi = gof_curve(result, ds)
    _write_csv(
        ns.out,
        ["u", "lambda_hat", "lo", "hi", "identity"],
        [[_fmt(u[i]), _fmt(lam[i]), _fmt(lo[i]), _fmt(hi[i]), _fmt(u[i])] for i in range(u.size)],
    )
    _emit_json(
        {"schema_version": SCHEMA_VERSION, "command": "gof", "written": [str(ns.out)],
         "n_knots": int(u.size)},
        None,
    )
    return 0


def _cmd_cv(ns) -> int:
    config = _load_config(ns.config)
    threads = _resolve_threads(ns, config)
    seed = _merged(ns, config, "seed")
    if seed is None:
        raise CliError("missing-seed", "cv is stochastic; --seed is required")
    k = _merged(ns, config, "k")
    if k is None:
        raise CliError("missing-config", "--k (number of folds) is required")
    ds, _ = load_dataset(ns.survival, ns.functional)
    if _wants_grid(ns, config):
        model_config = _grid_config(ns, config, default_r=0.0)
    else:
        model_config = _single_config(ns, config, ds, default_r=0.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        mean_c, per_fold = cv_c_index(ds, model_config, k=int(k), seed=int(seed), n_jobs=threads)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "cv",
        "k": int(k),
        "seed": int(seed),
        "mean_c": mean_c,
        "per_fold": [
            {"fold": i, "c": None if math.isnan(per_fold[i]) else float(per_fold[i])}
            for i in range(int(k))
        ],
        "n_excluded": int(np.isnan(per_fold).sum()),
    }
    _emit_json(payload, ns.out)
    return 0


def _cmd_simulate(ns) -> int:
    config = _load_config(ns.config)
    threads = _resolve_threads(ns, config)
    seed = _merged(ns, config, "seed")
    if seed is None:
        raise CliError("missing-seed", "simulate is stochastic; --seed is required")
    scenario = _merged(ns, config, "scenario")
    n = _merged(ns, config, "n")
    if scenario is None or n is None:
        raise CliError("missing-config", "--scenario and --n are required")
    m = int(_merged(ns, config, "m", 101))
    reps = _merged(ns, config, "reps")
    try:
        cfg = ScenarioConfig(str(scenario), n=int(n), m=m, seed=int(seed))
    except ValueError as exc:
        raise CliError("invalid-value", str(exc)) from exc

    written = []
    if ns.data_out is not None:
        data_dir = Path(ns.data_out)
        data_dir.mkdir(parents=True, exist_ok=True)
        ds, _ = generate(cfg, rep=int(ns.data_rep))
        write_dataset(ds, ("x1", "x2"), data_dir / "survival.csv", data_dir / "functional.csv")
        written += [str(data_dir / "survival.csv"), str(data_dir / "functional.csv")]

    report_summary = None
    if reps is not None:
        default_r = 0.0 if cfg.scenario == "a1" else 1.0
        if _wants_grid(ns, config):
            n0_grid, n1_grid, r_grid = _grid_config(ns, config, default_r=default_r)
        elif _merged(ns, config, "n0") is not None:
            spec_n0 = int(_merged(ns, config, "n0"))
            spec_n1 = _merged(ns, config, "n1")
            if spec_n1 is None:
                raise CliError("missing-config", "--n1 is required alongside --n0")
            n0_grid, n1_grid = (spec_n0,), (int(spec_n1),)
            r_grid = (float(_merged(ns, config, "r", default_r)),)
        else:
            n0_grid, n1_grid = _DEFAULT_N0_GRID, _DEFAULT_N1_GRID
            r_grid = (float(_merged(ns, config, "r", default_r)),)
        out_dir = Path(ns.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            report = monte_carlo(
                cfg, int(reps), n0=n0_grid, n1=n1_grid, r=r_grid,
                with_coverage=not ns.no_coverage, n_jobs=threads,
            )
        row_fields = [
            "rep", "failed", "reason", "censoring_rate", "n0", "n1", "r", "loglik", "aic",
            "sq_err_beta1", "sq_err_beta2", "ise_beta_s", "ise_h", "ise_h_weighted",
            "cover_beta1", "cover_beta2", "cover_beta_s",
        ]

        def cell(row, field):
            value = row.get(field, "")
            if isinstance(value, bool):
                return str(int(value))
            if isinstance(value, (int, np.integer)):
                return str(int(value))
            if isinstance(value, (float, np.floating)):
                return _fmt(value)
            return str(value)

        _write_csv(
            out_dir / "replications.csv",
            row_fields,
            [[cell(row, field) for field in row_fields] for row in report.rows],
        )
        report_summary = {
            "reps": report.reps,
            "n_failures": report.n_failures,
            "mse_beta": report.mse_beta,
            "mise_beta_s": report.mise_beta_s,
            "mise_h": report.mise_h,
            "mise_h_weighted": report.mise_h_weighted,
            "coverage_beta": report.coverage_beta,
            "coverage_beta_s": report.coverage_beta_s,
            "censoring_rate_mean": report.censoring_rate_mean,
        }
        payload = {
            "schema_version": SCHEMA_VERSION,
            "command": "simulate",
            "scenario": cfg.scenario,
            "n": cfg.n,
            "m": cfg.m,
            "seed": cfg.seed,
            "reps": int(reps),
            "n0_grid": list(n0_grid),
            "n1_grid": list(n1_grid),
            "r_grid": list(r_grid),
            "with_coverage": not ns.no_coverage,
            "report": report_summary,
        }
        _emit_json(payload, out_dir / "simulation.json")
        written += [str(out_dir / "simulation.json"), str(out_dir / "replications.csv")]

    if not written:
        raise CliError("missing-config", "nothing to do: pass --reps and/or --data-out")
    _emit_json(
        {"schema_version": SCHEMA_VERSION, "command": "simulate", "written": written},
        None,
    )
    return 0


def _cmd_validate(ns) -> int:
    ds, meta = load_dataset(ns.survival, ns.functional)
    findings = validate(ds)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "validate",
        "n": ds.n,
        "p": ds.p,
        "grid_points": meta["grid_points"],
        "grid_range": list(meta["grid_range"]),
        "scalar_names": list(meta["scalar_names"]),
        "n_events": ds.n_events,
        "censoring_rate": 1.0 - ds.event_fraction,
        "default_tau": default_tau(ds),
        "findings": [
            {"level": f.level, "code": f.code, "message": f.message} for f in findings
        ],
    }
    _emit_json(payload, ns.out)
    return 1 if any(f.level == "error" for f in findings) else 0


# ---------------------------------------------------------------------------
# parser


def _add_data_args(sub):
    sub.add_argument("--survival", required=True, help="survival CSV: id,time,status,<scalars>")
    sub.add_argument("--functional", required=True, help="functional CSV: id,<grid values>")


def _add_common(sub):
    sub.add_argument("--config", default=None, help="JSON config file; flags override it")
    sub.add_argument("--threads", type=int, default=None, help="worker cap (FTTM_THREADS mirrors this)")


def _add_model_args(sub):
    sub.add_argument("--n0", type=int, default=None, help="transformation degree (single fit)")
    sub.add_argument("--n1", type=int, default=None, help="coefficient-curve degree (single fit)")
    sub.add_argument("--r", type=float, default=None, help="logarithmic-family parameter")
    sub.add_argument("--tau", type=float, default=None, help="time horizon (default: data-driven)")
    sub.add_argument("--grid-n0", dest="grid_n0", type=_int_list, default=None, help="degree grid, e.g. 4,7,10,13")
    sub.add_argument("--grid-n1", dest="grid_n1", type=_int_list, default=None, help="degree grid, e.g. 3,5,7,9")
    sub.add_argument("--grid-r", dest="grid_r", type=_float_list, default=None, help="family grid, e.g. 0,1")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fttm",
        description="Time-transformation survival modeling with functional covariates.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    sub = subparsers.add_parser("fit", help="estimate the model and write report files")
    _add_data_args(sub)
    _add_model_args(sub)
    _add_common(sub)
    sub.add_argument("--out", default=".", help="output directory")
    sub.set_defaults(handler=_cmd_fit)

    sub = subparsers.add_parser("predict", help="survival curves for covariate profiles")
    sub.add_argument("--fit", required=True, help="fit.json from the fit command")
    _add_data_args(sub)
    _add_common(sub)
    sub.add_argument("--times", type=_float_list, default=None, help="comma-separated times")
    sub.add_argument("--out", default="predictions.csv", help="output CSV path")
    sub.set_defaults(handler=_cmd_predict)

    sub = subparsers.add_parser("gof", help="residual cumulative-hazard diagnostic")
    sub.add_argument("--fit", required=True, help="fit.json from the fit command")
    _add_data_args(sub)
    _add_common(sub)
    sub.add_argument("--out", default="gof.csv", help="output CSV path")
    sub.set_defaults(handler=_cmd_gof)

    sub = subparsers.add_parser("cv", help="cross-validated concordance")
    _add_data_args(sub)
    _add_model_args(sub)
    _add_common(sub)
    sub.add_argument("--k", type=int, default=None, help="number of folds")
    sub.add_argument("--seed", type=int, default=None, help="fold-assignment seed (required)")
    sub.add_argument("--out", default=None, help="output JSON path (default: stdout)")
    sub.set_defaults(handler=_cmd_cv)

    sub = subparsers.add_parser("simulate", help="synthetic data and replication studies")
    sub.add_argument("--scenario", default=None, help="a1 or a2")
    sub.add_argument("--n", type=int, default=None, help="sample size")
    sub.add_argument("--m", type=int, default=None, help="functional grid points (default 101)")
    sub.add_argument("--reps", type=int, default=None, help="replications for a study")
    sub.add_argument("--seed", type=int, default=None, help="master seed (required)")
    sub.add_argument("--no-coverage", action="store_true", help="skip interval-coverage metrics")
    _add_model_args(sub)
    _add_common(sub)
    sub.add_argument("--out", default=".", help="output directory for study reports")
    sub.add_argument("--data-out", dest="data_out", default=None, help="also write one generated dataset here")
    sub.add_argument("--data-rep", dest="data_rep", type=int, default=0, help="replication index for --data-out")
    sub.set_defaults(handler=_cmd_simulate)

    sub = subparsers.add_parser("validate", help="check data files and report findings")
    _add_data_args(sub)
    _add_common(sub)
    sub.add_argument("--out", default=None, help="output JSON path (default: stdout)")
    sub.set_defaults(handler=_cmd_validate)

    return parser


_ERROR_CODES = {
    FitError: "fit-failed",
    GridSearchError: "selection-failed",
    HorizonError: "horizon",
    np.linalg.LinAlgError: "linear-algebra",
    FileNotFoundError: "io",
    OSError: "io",
    ValueError: "invalid-value",
    RuntimeError: "runtime-failure",
}


def main(argv=None) -> int:
    """Entry point; returns the process exit code."""
    parser = _build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.handler(ns)
    except CliError as exc:
        _emit_json(
            {"schema_version": SCHEMA_VERSION, "error": {"code": exc.code, "message": str(exc)}},
            None,
        )
        return 1
    except tuple(_ERROR_CODES) as exc:
        for kind, code in _ERROR_CODES.items():
            if isinstance(exc, kind):
                break
        _emit_json(
            {"schema_version": SCHEMA_VERSION, "error": {"code": code, "message": str(exc)}},
            None,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
