"""INI-style experiment configuration.

Example::

    [experiment]
    kind = model-select
    seed = 2024
    out = results/tables

    [data]
    # for converge / model-select: simulated data
    dgps = gamma(1, 1); lognormal(0, 1); exponential(1)
    n_grid = 50, 200
    replications = 1
    # for report / sensitivity: a CSV file
    path = ../data/windshield.csv   # relative to this file
    column = time
    units = 1000h

    [model]
    models = gamma, lognormal, exponential
    family = power-cdf
    mode = likelihood
    g = identity

    [prior.gamma]
    shape = gamma(2, 1)
    rate = gamma(2, 1)

    [sampler]
    M = 2000
    burn_in = 5000
    thinning = 1
    chain_count = 1
    method = auto

Unknown sections or keys are rejected so that typos do not pass silently.
"""
import configparser
import os
import re
from dataclasses import dataclass, field, replace
from typing import Optional

from .distortion import POWER_CDF, family_from_name, mode_from_name, Mode
from .errors import ConfigError, DistSensError
from .models import Frozen, Prior, default_prior, model_from_name
from .posterior import SamplerConfig
from .sensitivity import GFunction, g_from_name

EXPERIMENTS = ("converge", "model-select", "report", "sensitivity")

_ALLOWED = {
    "experiment": {"kind", "seed", "out"},
    "data": {"dgps", "dgp", "n_grid", "n", "replications", "path", "column", "units", "theta0"},
    "model": {"models", "model", "family", "mode", "g"},
    "sampler": {"m", "burn_in", "thinning", "chain_count", "method", "target_accept", "step_sizes", "adapt_every"},
}

_CALL = re.compile(r"^\s*([A-Za-z_-]+)\s*\(\s*([^)]*)\)\s*$")


def parse_distribution(text):
    """``gamma(2, 1)`` -> (model, params)."""
    m = _CALL.match(text)
    if not m:
        raise ConfigError(f"expected family(params...), got {text!r}")
    name, args = m.group(1), m.group(2)
    try:
        params = tuple(float(a) for a in args.split(",") if a.strip())
        model = model_from_name(name)
    except (ValueError, DistSensError) as exc:
        raise ConfigError(f"bad distribution {text!r}: {exc}") from None
    return model, params


def _float_list(text):
    try:
        return [float(v) for v in re.split(r"[,\s]+", text.strip()) if v]
    except ValueError:
        raise ConfigError(f"expected a list of numbers, got {text!r}") from None


def _int_list(text):
    vals = _float_list(text)
    if any(v != int(v) for v in vals):
        raise ConfigError(f"expected integers, got {text!r}")
    return [int(v) for v in vals]


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int = 12345
    out: str = "results"
    dgps: list = field(default_factory=list)
    n_grid: list = field(default_factory=list)
    replications: int = 1
    data_path: Optional[str] = None
    column: Optional[str] = None
    units: str = ""
    models: list = field(default_factory=list)
    priors: dict = field(default_factory=dict)
    family: object = POWER_CDF
    mode: Mode = Mode.LIKELIHOOD
    g: GFunction = field(default_factory=GFunction.identity)
    M: int = 2000
    sampler: SamplerConfig = field(default_factory=SamplerConfig)

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        if self.M < 100:
            raise ConfigError(f"M must be >= 100 for experiments, got {self.M}")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ConfigError(f"n grid must be strictly increasing, got {self.n_grid}")
        if any(n < 1 for n in self.n_grid):
            raise ConfigError("n grid values must be positive")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if not isinstance(self.seed, int):
            raise ConfigError("seed must be an explicit integer")

    def prior_for(self, model):
        return self.priors.get(model.name) or default_prior(model)

    def with_overrides(self, seed=None, out=None):
        kw = {}
        if seed is not None:
            kw["seed"] = int(seed)
        if out is not None:
            kw["out"] = str(out)
        return replace(self, **kw) if kw else self


def _parse_models(text):
    out = []
    for name in re.split(r"[,\s]+", text.strip()):
        if not name:
            continue
        m = _CALL.match(name)
        try:
            if m and m.group(1).lower() == "normal":
                out.append(model_from_name("normal", mu=float(m.group(2))))
            else:
                out.append(model_from_name(name))
        except (ValueError, DistSensError) as exc:
            raise ConfigError(str(exc)) from None
    return out


def _parse_prior(model, section):
    comps = []
    for pname in model.param_names:
        if pname not in section:
            raise ConfigError(f"prior section for {model.name} lacks parameter {pname!r}")
        pm, params = parse_distribution(section[pname])
        try:
            comps.append(Frozen(pm, params))
        except DistSensError as exc:
            raise ConfigError(f"prior for {model.name}.{pname}: {exc}") from None
    extra = set(section) - set(model.param_names)
    if extra:
        raise ConfigError(f"prior section for {model.name} has unknown keys {sorted(extra)}")
    return Prior(tuple(comps))


def load_config(path, experiment=None):
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    cfg = config_from_parser(parser, experiment)
    # a relative dataset path is taken relative to the config file
    if cfg.data_path and not os.path.isabs(cfg.data_path):
        cfg = replace(cfg, data_path=os.path.normpath(os.path.join(os.path.dirname(os.path.abspath(path)), cfg.data_path)))
    return cfg


def config_from_string(text, experiment=None):
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    return config_from_parser(parser, experiment)


def config_from_parser(parser, experiment=None):
    for sec in parser.sections():
        if sec.startswith("prior."):
            continue
        if sec not in _ALLOWED:
            raise ConfigError(f"unknown config section [{sec}]")
        unknown = set(parser[sec]) - _ALLOWED[sec]
        if unknown:
            raise ConfigError(f"unknown keys in [{sec}]: {sorted(unknown)}")

    exp = parser["experiment"] if parser.has_section("experiment") else {}
    data = parser["data"] if parser.has_section("data") else {}
    mod = parser["model"] if parser.has_section("model") else {}
    smp = parser["sampler"] if parser.has_section("sampler") else {}

    kind = exp.get("kind", experiment)
    if kind is None:
        raise ConfigError("experiment kind not given")
    if experiment is not None and kind != experiment:
        raise ConfigError(f"config is for {kind!r} but the {experiment!r} command was run")

    kw = {"experiment": kind}
    try:
        if "seed" in exp:
            kw["seed"] = int(exp["seed"])
        if "out" in exp:
            kw["out"] = exp["out"]

        dgp_text = data.get("dgps", data.get("dgp"))
        if dgp_text:
            kw["dgps"] = [parse_distribution(t) for t in dgp_text.split(";") if t.strip()]
        if "theta0" in data:
            kw["dgps"] = [(model_from_name("exponential"), (float(data["theta0"]),))]
        grid = data.get("n_grid", data.get("n"))
        if grid:
            kw["n_grid"] = _int_list(grid)
        if "replications" in data:
            kw["replications"] = int(data["replications"])
        if "path" in data:
            kw["data_path"] = data["path"]
        if "column" in data:
            kw["column"] = data["column"]
        if "units" in data:
            kw["units"] = data["units"]

        models_text = mod.get("models", mod.get("model"))
        if models_text:
            kw["models"] = _parse_models(models_text)
        if "family" in mod:
            kw["family"] = family_from_name(mod["family"])
        if "mode" in mod:
            kw["mode"] = mode_from_name(mod["mode"])
        if "g" in mod:
            kw["g"] = g_from_name(mod["g"])

        priors = {}
        for sec in parser.sections():
            if sec.startswith("prior."):
                model = model_from_name(sec.split(".", 1)[1])
                for m in kw.get("models", []):
                    if m.name == model.name:
                        model = m
                priors[model.name] = _parse_prior(model, parser[sec])
        if priors:
            kw["priors"] = priors

        if "m" in smp:
            kw["M"] = int(smp["m"])
        skw = {}
        for key, conv in (("burn_in", int), ("thinning", int), ("chain_count", int), ("method", str),
                          ("target_accept", float), ("adapt_every", int)):
            if key in smp:
                skw[key] = conv(smp[key])
        if "step_sizes" in smp and smp["step_sizes"].strip():
            skw["step_sizes"] = tuple(_float_list(smp["step_sizes"]))
        if skw:
            kw["sampler"] = replace(default_config(kind).sampler, **skw)
        return replace(default_config(kind), **kw)
    except ConfigError:
        raise
    except (ValueError, DistSensError) as exc:
        raise ConfigError(str(exc)) from None


def default_config(kind):
    """Settings used when no config file is given (or a key is missing)."""
    if kind == "converge":
        return ExperimentConfig(
            experiment=kind,
            dgps=[(model_from_name("exponential"), (0.5,))],
            n_grid=[j ** 3 for j in range(3, 11)],
            models=[model_from_name("exponential")],
            priors={"exponential": Prior((Frozen(model_from_name("gamma"), (1.0, 1.0)),))},
            family=family_from_name("power-survival"),
            M=10000,
        )
    if kind == "model-select":
        return ExperimentConfig(
            experiment=kind,
            dgps=[parse_distribution(t) for t in ("gamma(1, 1)", "lognormal(0, 1)", "exponential(1)")],
            n_grid=[50, 200],
            models=[model_from_name(n) for n in ("gamma", "lognormal", "exponential")],
            family=POWER_CDF,
            M=2000,
        )
    if kind == "report":
        return ExperimentConfig(
            experiment=kind,
            models=[model_from_name(n) for n in ("gamma", "lognormal", "exponential")],
            family=POWER_CDF,
            M=2000,
        )
    if kind == "sensitivity":
        return ExperimentConfig(
            experiment=kind,
            models=[model_from_name("exponential")],
            family=POWER_CDF,
            M=10000,
        )
    raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {kind!r}")
