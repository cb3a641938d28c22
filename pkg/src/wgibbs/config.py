"""Experiment configuration: flat key=value INI text, strictly validated.

Unknown sections or keys are rejected outright; every value is type-checked
at parse time so a bad config dies before any sampling starts. serialize()
emits a canonical form, and parse(serialize(parse(text))) == parse(text).

Chain lengths can be given in single-variable steps (steps, burn_in) or in
full passes (sweeps, burn_in_sweeps); the pass form is resolved once the
model dimension is known.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field

__all__ = ["ConfigError", "ExperimentConfig", "parse_config", "serialize_config"]

KINDS = ("gaussian", "ising", "lda")
SCHEDULER_NAMES = ("systematic", "random", "weighted")

# per-kind model keys: name -> (required, converter name)
_MODEL_SCHEMA = {
    "gaussian": {
        "dimension": (True, "int"),
        "rank": (True, "int"),
        "eps": (True, "float"),
        "ridge": (True, "float"),
    },
    "ising": {
        "image": (True, "str"),
        "coupling": (False, "float"),
        "noise_sd": (False, "float"),
    },
    "lda": {
        "corpus": (True, "str"),
        "n_topics": (False, "int"),
        "alpha": (False, "float"),
        "beta": (False, "float"),
        "vocab": (False, "str"),
        "heldout": (False, "str"),
        "n_docs": (False, "int"),
        "doc_length": (False, "int"),
        "grid": (False, "int"),
    },
}

_MODEL_DEFAULTS = {
    "gaussian": {},
    "ising": {"coupling": 1.0, "noise_sd": 1.0},
    # alpha/beta None means the model picks 50/K and 200/V at build time
    "lda": {"n_topics": 8, "alpha": None, "beta": None,
            "n_docs": 2000, "doc_length": 100, "grid": 4},
}

_CHAIN_KEYS = ("steps", "sweeps", "burn_in", "burn_in_sweeps",
               "thinning", "seed", "initial_sweeps")
_SCHEDULER_KEYS = ("run", "update_period", "reg", "adapt_after_burn_in")


class ConfigError(Exception):
    """Malformed or inconsistent configuration."""


@dataclass
class ExperimentConfig:
    kind: str
    model: dict = field(default_factory=dict)
    steps: int | None = None
    sweeps: int | None = None
    burn_in: int | None = None
    burn_in_sweeps: int | None = None
    thinning: int = 1
    seed: int = 0
    initial_sweeps: int = 2
    schedulers: tuple = SCHEDULER_NAMES
    update_period: int | None = None     # None: once per sweep
    reg: float | None = None             # None: relative auto rule
    adapt_after_burn_in: bool = True
    out_dir: str | None = None

    def resolve_lengths(self, dim: int) -> tuple[int, int]:
        """(total steps, burn-in steps) once the model dimension is known."""
        total = self.steps if self.steps is not None else self.sweeps * dim
        if self.burn_in is not None:
            burn = self.burn_in
        elif self.burn_in_sweeps is not None:
            burn = self.burn_in_sweeps * dim
        else:
            burn = 0
        if not 0 <= burn < total:
            raise ConfigError(f"burn-in ({burn} steps) must be below total ({total} steps)")
        return total, burn


def _convert(kind: str, section: str, key: str, raw: str):
    raw = raw.strip()
    if kind == "int":
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"[{section}] {key}: expected integer, got {raw!r}") from None
    if kind == "float":
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"[{section}] {key}: expected number, got {raw!r}") from None
    if kind == "bool":
        if raw.lower() in ("true", "false"):
            return raw.lower() == "true"
        raise ConfigError(f"[{section}] {key}: expected true/false, got {raw!r}")
    return raw


def parse_config(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None,
                                       inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as err:
        raise ConfigError(f"malformed config: {err}") from None

    known_sections = {"experiment", "model", "chain", "scheduler", "output"}
    unknown = set(parser.sections()) - known_sections
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
    if not parser.has_section("experiment") or "kind" not in parser["experiment"]:
        raise ConfigError("missing required key: [experiment] kind")
    extra = set(parser["experiment"]) - {"kind"}
    if extra:
        raise ConfigError(f"unknown key(s) in [experiment]: {', '.join(sorted(extra))}")
    kind = parser["experiment"]["kind"].strip()
    if kind not in KINDS:
        raise ConfigError(f"unknown experiment kind {kind!r}; expected one of {KINDS}")

    schema = _MODEL_SCHEMA[kind]
    model = dict(_MODEL_DEFAULTS[kind])
    got = parser["model"] if parser.has_section("model") else {}
    extra = set(got) - set(schema)
    if extra:
        raise ConfigError(f"unknown key(s) in [model] for kind {kind}: "
                          f"{', '.join(sorted(extra))}")
    for key, (required, conv) in schema.items():
        if key in got:
            if kind == "lda" and key in ("alpha", "beta") \
                    and got[key].strip() == "auto":
                model[key] = None
            else:
                model[key] = _convert(conv, "model", key, got[key])
        elif required:
            raise ConfigError(f"missing required key: [model] {key}")
    if kind == "lda" and model["corpus"] != "bars":
        bars_only = {"n_docs", "doc_length", "grid"}
        stated = bars_only & set(got)
        if stated:
            raise ConfigError(f"[model] {', '.join(sorted(stated))} only apply "
                              "to corpus = bars")
        for key in bars_only:
            model.pop(key, None)
    _validate_model(kind, model)

    cfg = ExperimentConfig(kind=kind, model=model)

    chain = parser["chain"] if parser.has_section("chain") else {}
    extra = set(chain) - set(_CHAIN_KEYS)
    if extra:
        raise ConfigError(f"unknown key(s) in [chain]: {', '.join(sorted(extra))}")
    if ("steps" in chain) == ("sweeps" in chain):
        raise ConfigError("[chain] needs exactly one of steps or sweeps")
    if "burn_in" in chain and "burn_in_sweeps" in chain:
        raise ConfigError("[chain] allows at most one of burn_in or burn_in_sweeps")
    for key in ("steps", "sweeps", "burn_in", "burn_in_sweeps",
                "thinning", "seed", "initial_sweeps"):
        if key in chain:
            setattr(cfg, key, _convert("int", "chain", key, chain[key]))
    if cfg.steps is not None and cfg.steps < 1:
        raise ConfigError("[chain] steps must be positive")
    if cfg.sweeps is not None and cfg.sweeps < 1:
        raise ConfigError("[chain] sweeps must be positive")
    for key in ("burn_in", "burn_in_sweeps"):
        v = getattr(cfg, key)
        if v is not None and v < 0:
            raise ConfigError(f"[chain] {key} must be nonnegative")
    if cfg.thinning < 1:
        raise ConfigError("[chain] thinning must be positive")
    if cfg.initial_sweeps < 0:
        raise ConfigError("[chain] initial_sweeps must be nonnegative")

    sched = parser["scheduler"] if parser.has_section("scheduler") else {}
    extra = set(sched) - set(_SCHEDULER_KEYS)
    if extra:
        raise ConfigError(f"unknown key(s) in [scheduler]: {', '.join(sorted(extra))}")
    if "run" in sched:
        names = tuple(n.strip() for n in sched["run"].split(",") if n.strip())
        if not names:
            raise ConfigError("[scheduler] run must name at least one scheduler")
        bad = [n for n in names if n not in SCHEDULER_NAMES]
        if bad:
            raise ConfigError(f"[scheduler] unknown scheduler(s): {', '.join(bad)}")
        if len(set(names)) != len(names):
            raise ConfigError("[scheduler] run lists a scheduler twice")
        cfg.schedulers = names
    if "update_period" in sched and sched["update_period"].strip() != "auto":
        cfg.update_period = _convert("int", "scheduler", "update_period",
                                     sched["update_period"])
        if cfg.update_period < 1:
            raise ConfigError("[scheduler] update_period must be positive or auto")
    if "reg" in sched and sched["reg"].strip() != "auto":
        cfg.reg = _convert("float", "scheduler", "reg", sched["reg"])
        if cfg.reg < 0:
            raise ConfigError("[scheduler] reg must be nonnegative or auto")
    if "adapt_after_burn_in" in sched:
        cfg.adapt_after_burn_in = _convert("bool", "scheduler",
                                           "adapt_after_burn_in",
                                           sched["adapt_after_burn_in"])

    if parser.has_section("output"):
        extra = set(parser["output"]) - {"directory"}
        if extra:
            raise ConfigError(f"unknown key(s) in [output]: {', '.join(sorted(extra))}")
        if "directory" in parser["output"]:
            cfg.out_dir = parser["output"]["directory"].strip()

    return cfg


def _validate_model(kind: str, model: dict) -> None:
    if kind == "gaussian":
        if model["dimension"] < 2:
            raise ConfigError("[model] dimension must be at least 2")
        if not 1 <= model["rank"] <= model["dimension"]:
            raise ConfigError("[model] rank must lie in [1, dimension]")
        if model["eps"] < 0:
            raise ConfigError("[model] eps must be nonnegative")
        if model["ridge"] <= 0:
            raise ConfigError("[model] ridge must be positive")
    elif kind == "ising":
        if model["noise_sd"] <= 0:
            raise ConfigError("[model] noise_sd must be positive")
        img = model["image"]
        if img.startswith("shapes:"):
            try:
                h, w = (int(p) for p in img[len("shapes:"):].split("x"))
            except ValueError:
                raise ConfigError("[model] image shapes spec must be shapes:<H>x<W>") from None
            if h < 8 or w < 8:
                raise ConfigError("[model] shapes image must be at least 8x8")
    else:
        if model["n_topics"] < 2:
            raise ConfigError("[model] n_topics must be at least 2")
        for key in ("alpha", "beta"):
            if model[key] is not None and model[key] <= 0:
                raise ConfigError(f"[model] {key} must be positive or auto")
        bars = model["corpus"] == "bars"
        if bars:
            if model["n_docs"] < 1 or model["doc_length"] < 1:
                raise ConfigError("[model] n_docs and doc_length must be positive")
            if model["grid"] < 2:
                raise ConfigError("[model] grid must be at least 2")
            held = model.get("heldout")
            if held is not None and held.startswith("bars:"):
                try:
                    n = int(held[len("bars:"):])
                except ValueError:
                    raise ConfigError("[model] heldout bars spec must be bars:<count>") from None
                if n < 1:
                    raise ConfigError("[model] heldout count must be positive")
        else:
            if "vocab" not in model:
                raise ConfigError("[model] vocab file is required for a corpus path")
            held = model.get("heldout")
            if held is not None and held.startswith("bars:"):
                raise ConfigError("[model] heldout bars:<count> requires corpus = bars")


def serialize_config(cfg: ExperimentConfig) -> str:
    """Canonical INI form; parsing it back reproduces cfg exactly."""
    out = configparser.ConfigParser(interpolation=None)
    out["experiment"] = {"kind": cfg.kind}
    model = {}
    for key in _MODEL_SCHEMA[cfg.kind]:
        if key in cfg.model:
            value = cfg.model[key]
            model[key] = "auto" if value is None else _fmt_value(value)
    out["model"] = model
    chain = {}
    if cfg.steps is not None:
        chain["steps"] = str(cfg.steps)
    else:
        chain["sweeps"] = str(cfg.sweeps)
    if cfg.burn_in is not None:
        chain["burn_in"] = str(cfg.burn_in)
    elif cfg.burn_in_sweeps is not None:
        chain["burn_in_sweeps"] = str(cfg.burn_in_sweeps)
    chain["thinning"] = str(cfg.thinning)
    chain["seed"] = str(cfg.seed)
    chain["initial_sweeps"] = str(cfg.initial_sweeps)
    out["chain"] = chain
    out["scheduler"] = {
        "run": ",".join(cfg.schedulers),
        "update_period": "auto" if cfg.update_period is None else str(cfg.update_period),
        "reg": "auto" if cfg.reg is None else _fmt_value(cfg.reg),
        "adapt_after_burn_in": "true" if cfg.adapt_after_burn_in else "false",
    }
    if cfg.out_dir is not None:
        out["output"] = {"directory": cfg.out_dir}
    buf = io.StringIO()
    out.write(buf)
    return buf.getvalue()


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)
