"""Experiment orchestration: configuration, per-n stages, deterministic
reports in JSON or CSV."""

from __future__ import annotations

import csv
import io
import json
import os
import statistics
import subprocess
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import mpmath

from chizeta import moments
from chizeta.graph import sample_gnp_half
from chizeta.logreal import LogReal
from chizeta.profile_opt import first_moment_threshold, kstar_and_gap
from chizeta.rng import derive_seed
from chizeta.search import count_independent_sets, independence_number
from chizeta.solver import chromatic_number, cochromatic_number, greedy_cocolouring

SCHEMA = "chizeta.report/1"
FORMATS = ("json", "csv")


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    """A module error raised while processing one (n, stage); the original
    exception is kept as ``__cause__``."""

    def __init__(self, n: int, stage: str, cause: BaseException):
        super().__init__(f"n={n}, stage={stage}: {type(cause).__name__}: {cause}")
        self.n = n
        self.stage = stage
        self.cause = cause


@dataclass
class ExperimentConfig:
    n_list: list[int]
    eps: float = 0.1
    seed: int = 0
    samples: int = 10
    t_override: int | None = None
    format: str = "json"
    out: str | None = None
    exact_zeta_limit: int = 14
    exact_chi_limit: int = 30
    sample_limit: int = 200  # largest n for which alpha(G) is computed exactly
    workers: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not self.n_list:
            raise ConfigError("n_list must be non-empty")
        if any(int(n) < 3 for n in self.n_list):
            raise ConfigError(f"every n must be >= 3, got {self.n_list}")
        if not 0 < self.eps < 0.45:
            raise ConfigError(f"eps must lie in (0, 0.45), got {self.eps}")
        if self.samples < 1:
            raise ConfigError(f"samples must be >= 1, got {self.samples}")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.t_override is not None and self.t_override < 1:
            raise ConfigError("t_override must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    # flat "key = value" text, '#' comments, n_list comma separated
    @classmethod
    def parse_text(cls, text: str, overrides: dict | None = None) -> "ExperimentConfig":
        values: dict = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            values[key] = val
        values.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.from_mapping(values)

    @classmethod
    def from_mapping(cls, values: dict) -> "ExperimentConfig":
        known = {f.name: f for f in fields(cls)}
        unknown = set(values) - set(known)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "n_list" not in values:
            raise ConfigError("n_list is required")
        out = {}
        for key, val in values.items():
            if not isinstance(val, str):
                out[key] = val
            elif key == "n_list":
                out[key] = [int(float(x)) for x in val.replace(" ", "").split(",") if x]
            elif key == "eps":
                out[key] = float(val)
            elif key in ("format", "out"):
                out[key] = val
            elif key == "t_override":
                out[key] = None if val.lower() in ("", "none") else int(val)
            else:
                try:
                    out[key] = int(val)
                except ValueError:
                    raise ConfigError(f"{key}: expected an integer, got {val!r}") from None
        return cls(**out)

    def to_json(self) -> dict:
        d = asdict(self)
        d.pop("out")
        d.pop("workers")  # does not affect results
        return d


@dataclass
class RunReport:
    config: dict
    provenance: dict
    records: list[dict] = field(default_factory=list)
    schema: str = SCHEMA


def _git_describe() -> str | None:
    try:
        r = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True, text=True, timeout=5,
        )
    except (OSError, subprocess.SubprocessError):
        return None
    return r.stdout.strip() or None


def _provenance(seed: int) -> dict:
    # Timestamp only from SOURCE_DATE_EPOCH so reports stay reproducible.
    return {
        "seed": seed,
        "git_describe": _git_describe(),
        "timestamp": os.environ.get("SOURCE_DATE_EPOCH"),
        "mp_prec": mpmath.mp.prec,
    }


def _num(x) -> str:
    return mpmath.nstr(x, 17)


def run_sample(n: int, seed: int, idx: int, alpha_n: int, zeta_limit: int, chi_limit: int) -> dict:
    s = derive_seed(seed, n, idx)
    g = sample_gnp_half(n, s)
    rec = {
        "sample": idx,
        "sample_seed": s,
        "edges": g.edge_count(),
        "alpha_G": independence_number(g),
        "x_alpha": count_independent_sets(g, alpha_n),
        "greedy_zeta": greedy_cocolouring(g),
        "chi": None,
        "zeta": None,
        "chi_minus_zeta": None,
    }
    if n <= chi_limit:
        rec["chi"] = chromatic_number(g)
    if n <= zeta_limit:
        rec["zeta"] = cochromatic_number(g)
        if rec["chi"] is not None:
            rec["chi_minus_zeta"] = rec["chi"] - rec["zeta"]
    return rec


def _stage(n: int, name: str, fn, *args):
    try:
        return fn(*args)
    except StageError:
        raise
    except Exception as e:  # attach context, keep the original as cause
        raise StageError(n, name, e) from e


def _sampling(cfg: ExperimentConfig, n: int, alpha_n: int, pool) -> dict | None:
    if n > cfg.sample_limit:
        return None
    args = [(n, cfg.seed, i, alpha_n, cfg.exact_zeta_limit, cfg.exact_chi_limit) for i in range(cfg.samples)]
    if pool is None:
        rows = [run_sample(*a) for a in args]
    else:
        rows = list(pool.map(run_sample, *zip(*args)))
    alphas = [r["alpha_G"] for r in rows]
    summary = {
        "mean_alpha_G": statistics.fmean(alphas),
        "mean_x_alpha": statistics.fmean(r["x_alpha"] for r in rows),
        "mean_greedy_zeta": statistics.fmean(r["greedy_zeta"] for r in rows),
        "zeta_le_chi_all": None,
    }
    exact = [r for r in rows if r["chi_minus_zeta"] is not None]
    if exact:
        summary["zeta_le_chi_all"] = all(r["chi_minus_zeta"] >= 0 for r in exact)
        summary["mean_chi_minus_zeta"] = statistics.fmean(r["chi_minus_zeta"] for r in exact)
    return {"samples": rows, "summary": summary}


def run_n(cfg: ExperimentConfig, n: int, pool=None) -> dict:
    ad = _stage(n, "moments", moments.alpha_data, n)
    win = _stage(n, "moments", moments.window_condition, n, cfg.eps)
    t = cfg.t_override if cfg.t_override is not None else max(ad.alpha - 1, 1)
    thr = _stage(n, "threshold", first_moment_threshold, n, t)
    ks = None
    if cfg.t_override is None or t == ad.alpha - 1:
        ks = _stage(n, "kstar", kstar_and_gap, n, cfg.eps, thr).to_json()
    return {
        "n": n,
        "alpha_data": ad.to_json(),
        "window_holds": win.holds,
        "t": t,
        "threshold": thr.to_json(),
        "kstar": ks,
        "sampling": _stage(n, "sampling", _sampling, cfg, n, ad.alpha, pool),
    }


def run_experiment(config: ExperimentConfig) -> RunReport:
    config.validate()
    report = RunReport(config=config.to_json(), provenance=_provenance(config.seed))
    pool = ProcessPoolExecutor(config.workers) if config.workers > 1 else None
    try:
        for n in config.n_list:
            report.records.append(run_n(config, n, pool))
    finally:
        if pool is not None:
            pool.shutdown()
    return report


# -- serialisation -----------------------------------------------------------

CSV_COLUMNS = [
    "row_type", "n", "sample", "sample_seed", "edges", "alpha_G", "x_alpha",
    "greedy_zeta", "chi", "zeta", "chi_minus_zeta",
    "alpha0", "alpha", "log10_mu_alpha", "exponent", "window_holds", "t",
    "k_threshold", "threshold_method", "k_star", "k_1", "k_2",
    "mean_alpha_G", "mean_greedy_zeta", "zeta_le_chi_all",
]


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return v


def report_to_json(report: RunReport) -> dict:
    return {"schema": report.schema, "config": report.config,
            "provenance": report.provenance, "records": report.records}


def emit_report(report: RunReport, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(report_to_json(report), indent=2, sort_keys=True) + "\n").encode()
    if fmt != "csv":
        raise ConfigError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    w = csv.DictWriter(buf, CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for rec in report.records:
        samp = rec["sampling"]
        for row in samp["samples"] if samp else []:
            w.writerow({k: _csv_value(row.get(k)) for k in CSV_COLUMNS} | {"row_type": "sample", "n": rec["n"]})
        ad, thr, ks = rec["alpha_data"], rec["threshold"], rec["kstar"] or {}
        summary = samp["summary"] if samp else {}
        w.writerow({k: _csv_value(v) for k, v in {
            "row_type": "summary",
            "n": rec["n"],
            "alpha0": ad["alpha0"],
            "alpha": ad["alpha"],
            "log10_mu_alpha": ad["mu_alpha"]["log10"],
            "exponent": ad["exponent"],
            "window_holds": rec["window_holds"],
            "t": rec["t"],
            "k_threshold": thr["k_threshold"],
            "threshold_method": thr["method"],
            "k_star": ks.get("k_star"),
            "k_1": ks.get("k_1"),
            "k_2": ks.get("k_2"),
            "mean_alpha_G": summary.get("mean_alpha_G"),
            "mean_greedy_zeta": summary.get("mean_greedy_zeta"),
            "zeta_le_chi_all": summary.get("zeta_le_chi_all"),
        }.items()})
    return buf.getvalue().encode()


def parse_report(data: bytes) -> RunReport:
    d = json.loads(data)
    if d.get("schema") != SCHEMA:
        raise ValueError(f"unsupported report schema {d.get('schema')!r}")
    return RunReport(config=d["config"], provenance=d["provenance"], records=d["records"], schema=d["schema"])


def write_report(report: RunReport, fmt: str, out: str | None) -> bytes:
    data = emit_report(report, fmt)
    if out:
        Path(out).write_bytes(data)
    return data


def logreal_json(x: LogReal) -> dict:
    return x.to_json()
