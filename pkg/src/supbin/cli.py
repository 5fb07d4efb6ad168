"""Batch command-line front end.

``supbin run config.json --out outdir`` validates the config against a
JSON schema, dispatches on its ``kind``, and writes ``result.json``
plus kind-specific CSVs into the output directory.  Exit codes: 0 on
success, 2 on validation failure, 3 on a runtime refusal (for example
an experiment beyond the enumeration budget); failures also leave an
``error.json`` describing the problem.

All floats in CSV output are rendered with 9 significant digits, and
every random quantity flows from the config's mandatory ``seed``, so
reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from . import infoexpr as ix
from . import region as rg
from . import schemes as sc
from .codingsim import (
    ResourceRefusal,
    SimConfig,
    covering_experiment,
    inaccuracy_experiment,
    run_campaign,
    wilson_interval,
)
from .probcore import DomainError, JointPmf, VariableId

__all__ = ["main", "run_config", "list_schemes_text", "CONFIG_SCHEMA"]


def _fmt(x: float) -> str:
    return f"{x + 0.0:.9g}"


_PMF_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["cardinalities", "mass"],
    "properties": {
        "cardinalities": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "integer", "minimum": 1},
        },
        "mass": {"type": "array"},
        "labels": {"type": "array", "items": {"type": "string"}},
    },
}

_SPLIT_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "alpha": {"type": ["string", "integer"]},
        "beta": {"type": ["string", "integer"]},
    },
}

_SOURCE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "scheme": {"type": "string"},
        "split": _SPLIT_SCHEMA,
        "region": {"type": "object"},
        "eliminate": {"type": "array", "items": {"type": "string"}},
        "simplify": {"type": "boolean"},
    },
}

_RATE_MAP = {
    "type": "object",
    "additionalProperties": False,
    "patternProperties": {"^(R1|R2|Rho1|Rho2)$": {"type": "number", "minimum": 0}},
}

_KIND_SCHEMAS = {
    "region-build": {
        "required": ["source"],
        "properties": {"source": _SOURCE_SCHEMA},
    },
    "region-fme": {
        "required": ["source"],
        "properties": {"source": _SOURCE_SCHEMA},
    },
    "region-compare": {
        "required": ["left", "right"],
        "properties": {"left": _SOURCE_SCHEMA, "right": _SOURCE_SCHEMA},
    },
    "region-boundary": {
        "required": ["source", "pe", "pc", "channel", "input_map", "axes"],
        "properties": {
            "source": _SOURCE_SCHEMA,
            "pe": _PMF_SCHEMA,
            "pc": _PMF_SCHEMA,
            "channel": {"type": "array"},
            "input_map": {"type": "array"},
            "axes": {
                "type": "array",
                "minItems": 2,
                "maxItems": 2,
                "items": {"type": "string"},
            },
            "directions": {"type": "integer", "minimum": 4, "maximum": 100000},
        },
    },
    "sim-covering": {
        "required": ["p1", "q2", "n", "epsilon", "trials", "rhat_grid"],
        "properties": {
            "p1": _PMF_SCHEMA,
            "q2": _PMF_SCHEMA,
            "n": {"type": "integer", "minimum": 1},
            "epsilon": {"type": "number"},
            "trials": {"type": "integer", "minimum": 0},
            "rhat_grid": {"type": "array", "minItems": 1, "items": {"type": "number"}},
            "strict": {"type": "boolean"},
        },
    },
    "sim-inaccuracy": {
        "required": ["p", "q", "n", "trials"],
        "properties": {
            "p": _PMF_SCHEMA,
            "q": _PMF_SCHEMA,
            "n": {"type": "integer", "minimum": 1},
            "trials": {"type": "integer", "minimum": 0},
        },
    },
    "sim-bc-cm": {
        "required": ["n", "rates", "epsilon", "trials", "pe", "pc", "channel", "input_map"],
        "properties": {
            "n": {"type": "integer", "minimum": 1},
            "rates": _RATE_MAP,
            "epsilon": {"type": "number"},
            "trials": {"type": "integer", "minimum": 0},
            "pe": _PMF_SCHEMA,
            "pc": _PMF_SCHEMA,
            "channel": {"type": "array"},
            "input_map": {"type": "array"},
            "margin": {"type": "number", "minimum": 0},
            "strict": {"type": "boolean"},
        },
    },
    "info-eval": {
        "required": ["pe", "pc", "quantities"],
        "properties": {
            "pe": _PMF_SCHEMA,
            "pc": _PMF_SCHEMA,
            "quantities": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["name", "kind"],
                    "properties": {
                        "name": {"type": "string"},
                        "kind": {
                            "enum": ["entropy", "cross-entropy", "mutual-information", "kl"]
                        },
                        "label": {"enum": ["c", "e"]},
                        "varset": {"type": "array", "items": {"type": "integer"}},
                        "a": {"type": "array", "items": {"type": "integer"}},
                        "b": {"type": "array", "items": {"type": "integer"}},
                        "of": {"type": "array", "items": {"type": "integer"}},
                        "given": {"type": "array", "items": {"type": "integer"}},
                    },
                },
            },
        },
    },
}


def _schema_for(kind: str) -> dict:
    extra = _KIND_SCHEMAS[kind]
    props = {
        "version": {"const": 1},
        "kind": {"const": kind},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
    }
    props.update(extra["properties"])
    return {
        "type": "object",
        "additionalProperties": False,
        "required": ["version", "kind", "seed"] + list(extra.get("required", [])),
        "properties": props,
    }


CONFIG_SCHEMA = {
    "oneOf": [_schema_for(k) for k in sorted(_KIND_SCHEMAS)],
}


class ConfigError(ValueError):
    """Invalid config content (exit code 2)."""


def _parse_pmf(doc: dict) -> JointPmf:
    cards = tuple(doc["cardinalities"])
    mass = np.asarray(doc["mass"], dtype=float)
    if mass.shape != cards:
        raise ConfigError(
            f"pmf 'mass' has shape {mass.shape}, 'cardinalities' say {cards}"
        )
    labels = doc.get("labels") or [f"v{i}" for i in range(len(cards))]
    if len(labels) != len(cards):
        raise ConfigError("pmf 'labels' length must match 'cardinalities'")
    variables = tuple(VariableId(i, lbl) for i, lbl in enumerate(labels))
    try:
        return JointPmf(variables, mass)
    except DomainError as exc:
        raise ConfigError(f"pmf 'mass': {exc}") from exc


def _parse_fraction(v) -> Fraction:
    try:
        return Fraction(v)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not an exact rational: {v!r}") from exc


def _parse_split(doc: dict | None) -> sc.SplitSpec | None:
    if doc is None:
        return None
    kwargs = {}
    for k in ("alpha", "beta"):
        if k in doc:
            kwargs[k] = _parse_fraction(doc[k])
    return sc.SplitSpec(**kwargs)


def _resolve_source(doc: dict) -> rg.RateRegion:
    if ("scheme" in doc) == ("region" in doc):
        raise ConfigError("region source needs exactly one of 'scheme' or 'region'")
    if "scheme" in doc:
        name = doc["scheme"]
        if name not in sc.SCHEME_BUILDERS:
            raise ConfigError(f"unknown scheme {name!r}; see list-schemes")
        split = _parse_split(doc.get("split"))
        builder = sc.SCHEME_BUILDERS[name]
        if name in ("bc", "ifc", "hk"):
            region = builder(split=split) if split else builder()
        else:
            if split is not None:
                raise ConfigError(f"scheme {name!r} takes no split")
            region = builder()
    else:
        region = rg.region_from_json(doc["region"])
    for victim in doc.get("eliminate", []):
        region = rg.fme_eliminate(region, victim)
    if doc.get("simplify"):
        region = rg.simplify_symbolic(region)
    return region


def _write_json(path: Path, payload: dict):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _run_region_build(cfg: dict, out: Path) -> dict:
    region = _resolve_source(cfg["source"])
    doc = rg.region_to_json(region)
    _write_json(out / "region.json", doc)
    return {
        "symbols": region.names(),
        "inequalities": region.render().splitlines(),
        "region_file": "region.json",
    }


def _run_region_compare(cfg: dict, out: Path) -> dict:
    left = _resolve_source(cfg["left"])
    right = _resolve_source(cfg["right"])
    return {"equal": rg.region_equal(left, right)}


def _instantiate_from(cfg: dict) -> tuple[rg.RateRegion, rg.NumericPolytope]:
    region = _resolve_source(cfg["source"])
    pe = _parse_pmf(cfg["pe"])
    pc_law = _parse_pmf(cfg["pc"])
    kernel = np.asarray(cfg["channel"], dtype=float)
    imap = np.asarray(cfg["input_map"], dtype=int)
    n_out = kernel.ndim - 1
    labels = tuple(f"Y{i + 1}" for i in range(n_out))
    try:
        full = sc.channel_extend(pe, imap, kernel, labels)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    return region, rg.instantiate(region, full, pc_law)


def _run_region_boundary(cfg: dict, out: Path) -> dict:
    region, poly = _instantiate_from(cfg)
    axes = tuple(cfg["axes"])
    for a in axes:
        if a not in region.names():
            raise ConfigError(f"axis {a!r} is not a symbol of the region")
    boundary = rg.boundary_2d(poly, axes, cfg.get("directions", 720))
    (out / "boundary.csv").write_text(rg.boundary_to_csv(boundary))
    return {
        "axes": list(axes),
        "vertices": [[float(x), float(y)] for x, y in boundary.vertices],
        "unbounded_directions": int(boundary.unbounded.sum()),
        "boundary_file": "boundary.csv",
    }


def _run_sim_covering(cfg: dict, out: Path) -> dict:
    p1 = _parse_pmf(cfg["p1"])
    q2 = _parse_pmf(cfg["q2"])
    lines = ["rhat,success_rate,ci_lo,ci_hi"]
    rows = []
    for i, rhat in enumerate(cfg["rhat_grid"]):
        if rhat < 0:
            raise ConfigError("rhat values must be nonnegative")
        rate, outcomes = covering_experiment(
            p1, q2, float(rhat), cfg["n"], cfg["epsilon"], cfg["trials"],
            seed=cfg["seed"] + i, zero_support_strict=cfg.get("strict", True),
        )
        lo, hi = wilson_interval(sum(outcomes), len(outcomes))
        lines.append(f"{_fmt(rhat)},{_fmt(rate)},{_fmt(lo)},{_fmt(hi)}")
        rows.append({"rhat": float(rhat), "success_rate": rate})
    (out / "sweep.csv").write_text("\n".join(lines) + "\n")
    return {"sweep": rows, "sweep_file": "sweep.csv"}


def _run_sim_inaccuracy(cfg: dict, out: Path) -> dict:
    p = _parse_pmf(cfg["p"])
    q = _parse_pmf(cfg["q"])
    stats = inaccuracy_experiment(p, q, cfg["n"], cfg["trials"], cfg["seed"])
    lines = ["trial,per_symbol_bits"]
    for t, v in enumerate(stats["values"]):
        lines.append(f"{t},{_fmt(float(v))}")
    (out / "trials.csv").write_text("\n".join(lines) + "\n")
    return {
        "target_bits": stats["target"],
        "mean": stats["mean"],
        "std": stats["std"],
        "min": stats["min"],
        "max": stats["max"],
        "trials_file": "trials.csv",
    }


def _run_sim_bc_cm(cfg: dict, out: Path, threads: int) -> dict:
    pe = _parse_pmf(cfg["pe"])
    pc_law = _parse_pmf(cfg["pc"])
    try:
        sim = SimConfig(
            n=cfg["n"],
            rates=cfg["rates"],
            epsilon=cfg["epsilon"],
            trials=cfg["trials"],
            seed=cfg["seed"],
            pe=pe,
            pc=pc_law,
            channel=np.asarray(cfg["channel"], dtype=float),
            input_map=np.asarray(cfg["input_map"], dtype=int),
            margin=cfg.get("margin", 0.1),
            zero_support_strict=cfg.get("strict", True),
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    report = run_campaign(sim, threads=threads)
    lines = ["trial,encode_ok,b1,b2,dec1,dec2"]
    for r in report.trials:
        lines.append(
            f"{r.trial},{int(r.encode_ok)},{r.b1},{r.b2},{int(r.dec1_ok)},{int(r.dec2_ok)}"
        )
    (out / "trials.csv").write_text("\n".join(lines) + "\n")
    summary = [
        "metric,rate,ci_lo,ci_hi",
        f"encode,{_fmt(report.encode_rate)},{_fmt(report.encode_ci[0])},{_fmt(report.encode_ci[1])}",
        f"decode1,{_fmt(report.dec1_rate)},{_fmt(report.dec1_ci[0])},{_fmt(report.dec1_ci[1])}",
        f"decode2,{_fmt(report.dec2_rate)},{_fmt(report.dec2_ci[0])},{_fmt(report.dec2_ci[1])}",
    ]
    (out / "summary.csv").write_text("\n".join(summary) + "\n")
    return {
        "encode_rate": report.encode_rate,
        "dec1_rate": report.dec1_rate,
        "dec2_rate": report.dec2_rate,
        "mean_typical_bins": report.mean_typical_bins,
        "codebook_sizes": report.sizes,
        "trials_file": "trials.csv",
        "summary_file": "summary.csv",
    }


def _run_info_eval(cfg: dict, out: Path) -> dict:
    from . import probcore

    pe = _parse_pmf(cfg["pe"])
    pc_law = _parse_pmf(cfg["pc"])
    values = {}
    lines = ["name,bits"]
    for q in cfg["quantities"]:
        kind = q["kind"]
        label = q.get("label", "e")
        law = pe if label == "e" else pc_law
        try:
            if kind == "entropy":
                v = probcore.entropy(law, q.get("varset"))
            elif kind == "cross-entropy":
                v = probcore.cross_entropy(pe, pc_law, q.get("varset"))
            elif kind == "mutual-information":
                v = probcore.mutual_information(law, q["a"], q["b"], q.get("given", ()))
            else:
                v = probcore.conditional_kl(pe, pc_law, q["of"], q.get("given", ()))
        except (DomainError, KeyError) as exc:
            raise ConfigError(f"quantity {q.get('name')!r}: {exc}") from exc
        values[q["name"]] = v
        lines.append(f"{q['name']},{_fmt(v)}")
    (out / "values.csv").write_text("\n".join(lines) + "\n")
    return {"values": values, "values_file": "values.csv"}


def run_config(config_path: str, out_dir: str, threads: int = 1) -> int:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    def fail(code: int, kind: str, message: str) -> int:
        _write_json(out / "error.json", {"error": kind, "message": message})
        print(f"error: {message}", file=sys.stderr)
        return code

    try:
        raw = Path(config_path).read_text()
    except OSError as exc:
        return fail(2, "io", f"cannot read config: {exc}")
    try:
        cfg = json.loads(raw)
    except json.JSONDecodeError as exc:
        return fail(2, "json", f"config is not valid JSON: {exc}")
    kind = cfg.get("kind")
    if kind not in _KIND_SCHEMAS:
        return fail(2, "validation", f"unknown kind {kind!r}")
    try:
        jsonschema.validate(cfg, _schema_for(kind))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "(top level)"
        return fail(2, "validation", f"config field {where}: {exc.message}")
    try:
        if kind == "region-build" or kind == "region-fme":
            result = _run_region_build(cfg, out)
        elif kind == "region-compare":
            result = _run_region_compare(cfg, out)
        elif kind == "region-boundary":
            result = _run_region_boundary(cfg, out)
        elif kind == "sim-covering":
            result = _run_sim_covering(cfg, out)
        elif kind == "sim-inaccuracy":
            result = _run_sim_inaccuracy(cfg, out)
        elif kind == "sim-bc-cm":
            result = _run_sim_bc_cm(cfg, out, threads)
        else:
            result = _run_info_eval(cfg, out)
    except (ConfigError, DomainError) as exc:
        return fail(2, "validation", str(exc))
    except ResourceRefusal as exc:
        return fail(3, "refusal", str(exc))
    result = {"kind": kind, "seed": cfg["seed"], **result}
    _write_json(out / "result.json", result)
    return 0


def list_schemes_text() -> str:
    lines = []
    for name in sorted(sc.SCHEME_BUILDERS):
        region = sc.SCHEME_BUILDERS[name]()
        lines.append(f"{name}: symbols {', '.join(region.names())}")
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="supbin",
        description="Rate-region computation and random-coding experiments.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute one experiment config")
    p_run.add_argument("config", help="path to a JSON experiment config")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--threads", type=int, default=1, help="worker threads for trials")
    sub.add_parser("list-schemes", help="print available scheme builders")
    args = parser.parse_args(argv)
    if args.command == "list-schemes":
        print(list_schemes_text())
        return 0
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2
    return run_config(args.config, args.out, threads=args.threads)


if __name__ == "__main__":
    sys.exit(main())
