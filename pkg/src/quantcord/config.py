"""Config files: YAML in, validated dataclasses out, and back again.

The grammar is plain key/value with nested sections; model terms are
declared (column, transform, interaction pair), there is no formula
language.  ``from_dict``/``to_dict`` round-trip identically, which the
tests pin down.
"""

from dataclasses import dataclass

import yaml

from .basis import TermSpec, center, identity, interaction, spline
from .exceptions import InvalidArgumentError
from .pipeline import DEFAULT_GRID_POINTS, AnalysisSpec
from .synthetic import CovariateSpec, ScenarioSpec

DEFAULT_TAUS = (0.1, 0.25, 0.5, 0.75, 0.9)


@dataclass(frozen=True)
class BootstrapConfig:
    enabled: bool = False
    replicates: int = 1000
    seed: int = 0
    level: float = 0.95
    workers: int = 1

    def __post_init__(self):
        if self.enabled and self.replicates < 2:
            raise InvalidArgumentError(
                f"bootstrap replicates must be at least 2, got {self.replicates}"
            )
        if not 0.0 < self.level < 1.0:
            raise InvalidArgumentError(f"level must be in (0, 1), got {self.level}")


@dataclass(frozen=True)
class RunConfig:
    """One analysis run: where the data lives, what to fit, what to write."""

    input: str
    spec: AnalysisSpec
    bootstrap: BootstrapConfig = BootstrapConfig()
    output_dir: str = "quantcord_out"


def _require_keys(section, d, allowed, required=()):
    unknown = sorted(set(d) - set(allowed))
    if unknown:
        raise InvalidArgumentError(
            f"unknown keys in {section}: {unknown}; allowed: {sorted(allowed)}"
        )
    for k in required:
        if k not in d:
            raise InvalidArgumentError(f"missing required key {k!r} in {section}")


def parse_term(d):
    """One term declaration: {column[, transform[, value]]} or {interaction: [a, b]}."""
    if not isinstance(d, dict):
        raise InvalidArgumentError(f"term must be a mapping, got {d!r}")
    if "interaction" in d:
        _require_keys("term", d, ("interaction",))
        pair = d["interaction"]
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise InvalidArgumentError(
                f"interaction needs exactly two column names, got {pair!r}"
            )
        return interaction(str(pair[0]), str(pair[1]))
    _require_keys("term", d, ("column", "transform", "value"), required=("column",))
    col = str(d["column"])
    transform = d.get("transform", "identity")
    if transform == "identity":
        if "value" in d:
            raise InvalidArgumentError("identity terms take no value")
        return identity(col)
    if transform == "center":
        return center(col, d.get("value"))
    if transform == "spline":
        if "value" in d:
            raise InvalidArgumentError("spline terms take no value")
        return spline(col)
    raise InvalidArgumentError(
        f"unknown transform {transform!r}; use identity, center or spline"
    )


def term_to_dict(term):
    if term.kind == "interaction":
        return {"interaction": [term.column, term.column2]}
    out = {"column": term.column}
    if term.kind != "identity":
        out["transform"] = term.kind
    if term.kind == "center" and term.center is not None:
        out["value"] = term.center
    return out


def _parse_taus(value):
    if isinstance(value, dict):
        _require_keys("taus", value, ("start", "stop", "step"),
                      required=("start", "stop", "step"))
        start, stop, step = (float(value[k]) for k in ("start", "stop", "step"))
        if step <= 0:
            raise InvalidArgumentError(f"tau step must be positive, got {step}")
        taus = []
        k = 0
        while True:
            t = start + k * step
            if t > stop + 1e-12:
                break
            taus.append(round(t, 12))
            k += 1
        return tuple(taus)
    if isinstance(value, (list, tuple)):
        return tuple(float(t) for t in value)
    raise InvalidArgumentError("taus must be a list or a {start, stop, step} range")


_RUN_KEYS = (
    "input", "output_dir", "responses", "taus", "merged", "binary",
    "step1_terms", "step2_terms", "grid", "bootstrap",
)


def run_config_from_dict(d):
    _require_keys("config", d, _RUN_KEYS, required=("input", "responses"))
    grid = d.get("grid", {}) or {}
    _require_keys("grid", grid, ("points", "values", "held"))
    spec = AnalysisSpec(
        responses=tuple(str(r) for r in d["responses"]),
        taus=_parse_taus(d.get("taus", list(DEFAULT_TAUS))),
        step1_terms=tuple(parse_term(t) for t in d.get("step1_terms", []) or []),
        step2_terms=tuple(parse_term(t) for t in d.get("step2_terms", []) or []),
        merged=bool(d.get("merged", False)),
        grid_points=int(grid.get("points", DEFAULT_GRID_POINTS)),
        grid_values={str(k): tuple(float(x) for x in v)
                     for k, v in (grid.get("values", {}) or {}).items()},
        held={str(k): float(v) for k, v in (grid.get("held", {}) or {}).items()},
        binary=tuple(str(b) for b in d.get("binary", []) or []),
    )
    boot = d.get("bootstrap", {}) or {}
    _require_keys("bootstrap", boot,
                  ("enabled", "replicates", "seed", "level", "workers"))
    bootstrap = BootstrapConfig(
        enabled=bool(boot.get("enabled", False)),
        replicates=int(boot.get("replicates", 1000)),
        seed=int(boot.get("seed", 0)),
        level=float(boot.get("level", 0.95)),
        workers=int(boot.get("workers", 1)),
    )
    return RunConfig(
        input=str(d["input"]),
        spec=spec,
        bootstrap=bootstrap,
        output_dir=str(d.get("output_dir", "quantcord_out")),
    )


def run_config_to_dict(cfg):
    spec = cfg.spec
    out = {
        "input": cfg.input,
        "output_dir": cfg.output_dir,
        "responses": list(spec.responses),
        "taus": list(spec.taus),
        "merged": spec.merged,
        "binary": list(spec.binary),
        "step1_terms": [term_to_dict(t) for t in spec.step1_terms],
        "step2_terms": [term_to_dict(t) for t in spec.step2_terms],
        "grid": {
            "points": spec.grid_points,
            "values": {k: list(v) for k, v in spec.grid_values.items()},
            "held": dict(spec.held),
        },
        "bootstrap": {
            "enabled": cfg.bootstrap.enabled,
            "replicates": cfg.bootstrap.replicates,
            "seed": cfg.bootstrap.seed,
            "level": cfg.bootstrap.level,
            "workers": cfg.bootstrap.workers,
        },
    }
    return out


_SCENARIO_KEYS = (
    "n", "seed", "rho", "rho_by_group", "covariates", "coefficients",
    "responses", "taus",
)


def scenario_from_dict(d):
    """Parse a synth config; returns the scenario and the sidecar taus."""
    _require_keys("scenario", d, _SCENARIO_KEYS, required=("n",))
    covariates = []
    for c in d.get("covariates", []) or []:
        _require_keys("covariate", c, ("name", "kind", "low", "high", "p"),
                      required=("name",))
        covariates.append(CovariateSpec(
            name=str(c["name"]),
            kind=str(c.get("kind", "uniform")),
            low=float(c.get("low", 0.0)),
            high=float(c.get("high", 1.0)),
            p=float(c.get("p", 0.5)),
        ))
    rho_by_group = None
    group_column = None
    rho = 0.5
    if "rho_by_group" in d:
        if "rho" in d:
            raise InvalidArgumentError("give either rho or rho_by_group, not both")
        rbg = d["rho_by_group"]
        _require_keys("rho_by_group", rbg, ("column", "values"),
                      required=("column", "values"))
        vals = rbg["values"]
        if isinstance(vals, dict):
            vals = [vals[k] for k in (0, 1)]
        if len(vals) != 2:
            raise InvalidArgumentError("rho_by_group needs values for groups 0 and 1")
        rho_by_group = {0: float(vals[0]), 1: float(vals[1])}
        group_column = str(rbg["column"])
    elif "rho" in d:
        rho = float(d["rho"])
    coefficients = {
        str(resp): {str(k): float(v) for k, v in (coefs or {}).items()}
        for resp, coefs in (d.get("coefficients", {}) or {}).items()
    }
    scenario = ScenarioSpec(
        n=int(d["n"]),
        rho=rho,
        rho_by_group=rho_by_group,
        group_column=group_column,
        covariates=tuple(covariates),
        coefficients=coefficients,
        response_names=tuple(str(r) for r in d.get("responses", ("y1", "y2"))),
        seed=int(d.get("seed", 0)),
    )
    taus = _parse_taus(d.get("taus", list(DEFAULT_TAUS)))
    for t in taus:
        if not 0.0 < t < 1.0:
            raise InvalidArgumentError(f"tau must be in (0, 1), got {t}")
    return scenario, taus


def scenario_to_dict(scenario, taus=DEFAULT_TAUS):
    out = {
        "n": scenario.n,
        "seed": scenario.seed,
        "covariates": [
            {"name": c.name, "kind": c.kind, "low": c.low, "high": c.high, "p": c.p}
            for c in scenario.covariates
        ],
        "coefficients": {k: dict(v) for k, v in scenario.coefficients.items()},
        "responses": list(scenario.response_names),
        "taus": list(taus),
    }
    if scenario.rho_by_group is not None:
        out["rho_by_group"] = {
            "column": scenario.group_column,
            "values": [scenario.rho_by_group[0], scenario.rho_by_group[1]],
        }
    else:
        out["rho"] = scenario.rho
    return out


def load_run_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        d = yaml.safe_load(fh)
    if not isinstance(d, dict):
        raise InvalidArgumentError(f"{path}: config must be a mapping")
    return run_config_from_dict(d)


def load_scenario(path):
    with open(path, "r", encoding="utf-8") as fh:
        d = yaml.safe_load(fh)
    if not isinstance(d, dict):
        raise InvalidArgumentError(f"{path}: config must be a mapping")
    return scenario_from_dict(d)


def dump_run_config(cfg, path):
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(run_config_to_dict(cfg), fh, sort_keys=False)
