"""Scenario configuration and its flat ``key = value`` file format."""

import dataclasses
import re
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ConfigInvalid
from .design import DesignKind

ESTIMATORS = ("proposed", "proposed_lasso", "source_only", "target_only", "pooling")
TUNING_MODES = ("oracle", "estimated")
ADVERSARIES = ("nash", "pooling_worst")
TARGET_BASES = ("eigen", "original")


def parse_beta_spec(text):
    """Normalize ``all_ones``, ``sparse(k, value)`` or an explicit vector."""
    if isinstance(text, (list, tuple, np.ndarray)):
        return tuple(float(v) for v in text)
    s = str(text).strip()
    low = s.lower()
    if low == "all_ones":
        return "all_ones"
    m = re.fullmatch(r"sparse\(\s*(\d+)\s*(?:,\s*([-+0-9.eE]+)\s*)?\)", low)
    if m:
        return f"sparse({int(m.group(1))},{float(m.group(2) or 1.0):g})"
    m = re.fullmatch(r"(?:explicit)?\(?\[?([^()\[\]]*)\]?\)?", s)
    if m:
        try:
            return tuple(float(v) for v in m.group(1).split(",") if v.strip())
        except ValueError:
            pass
    raise ConfigInvalid(f"cannot parse beta_T_spec {text!r}")


def resolve_beta(spec, d):
    spec = parse_beta_spec(spec)
    if spec == "all_ones":
        return np.ones(d)
    if isinstance(spec, str):
        k, value = spec[len("sparse("):-1].split(",")
        k = int(k)
        if k > d:
            raise ConfigInvalid(f"sparse support {k} exceeds dimension {d}")
        out = np.zeros(d)
        out[:k] = float(value)
        return out
    if len(spec) != d:
        raise ConfigInvalid(f"explicit beta_T_spec has length {len(spec)}, expected {d}")
    return np.array(spec, dtype=float)


def _parse_floats(text):
    if text is None:
        return None
    if isinstance(text, (list, tuple, np.ndarray)):
        return tuple(float(v) for v in text)
    s = str(text).strip()
    if s.lower() in ("", "none"):
        return None
    m = re.fullmatch(r"linspace\(\s*([^,]+),\s*([^,]+),\s*(\d+)\s*\)", s)
    if m:
        return tuple(float(v) for v in np.linspace(float(m.group(1)), float(m.group(2)),
                                                  int(m.group(3))))
    return tuple(float(v) for v in s.strip("[]()").split(",") if v.strip())


def _parse_names(text):
    if isinstance(text, (list, tuple)):
        names = tuple(str(v).strip() for v in text)
    else:
        names = tuple(v.strip() for v in str(text).split(",") if v.strip())
    return names


@dataclass(frozen=True)
class ScenarioConfig:
    """One Monte-Carlo scenario.

    The defaults reproduce the baseline moderate-dimension setting:
    ``d=20, n_S=1000, n_T=100`` with unit noise variances.

    Fields beyond the core protocol: ``adversary`` selects the source
    parameter (Nash equilibrium of the interpolation game, or the pooled
    estimator's worst case), ``target_basis`` says whether ``beta_T_spec``
    gives pencil coordinates or original coordinates, and the ``cv_*`` /
    ``lasso_grid_size`` fields control estimated tuning.
    """

    d: int = 20
    n_S: int = 1000
    n_T: int = 100
    sigma_S2: float = 1.0
    sigma_T2: float = 1.0
    U_true: float = 1.0
    design_kind_source: DesignKind = field(default_factory=DesignKind)
    design_kind_target: DesignKind = field(default_factory=DesignKind)
    beta_T_spec: object = "all_ones"
    replications: int = 1000
    seed: int = 0
    estimator_set: tuple = ("proposed", "source_only", "target_only", "pooling")
    U_guess_grid: tuple | None = None
    tuning_mode: str = "oracle"
    adversary: str = "nash"
    target_basis: str = "eigen"
    cv_folds: int = 5
    cv_grid_size: int = 20
    lasso_grid_size: int = 30
    n_jobs: int = 1

    def __post_init__(self):
        try:
            for name in ("d", "n_S", "n_T", "replications", "seed", "cv_folds", "cv_grid_size",
                         "lasso_grid_size", "n_jobs"):
                object.__setattr__(self, name, int(getattr(self, name)))
            for name in ("sigma_S2", "sigma_T2", "U_true"):
                object.__setattr__(self, name, float(getattr(self, name)))
        except (TypeError, ValueError) as exc:
            raise ConfigInvalid(str(exc)) from exc
        object.__setattr__(self, "design_kind_source", DesignKind.parse(self.design_kind_source))
        object.__setattr__(self, "design_kind_target", DesignKind.parse(self.design_kind_target))
        object.__setattr__(self, "beta_T_spec", parse_beta_spec(self.beta_T_spec))
        object.__setattr__(self, "estimator_set", _parse_names(self.estimator_set))
        object.__setattr__(self, "U_guess_grid", _parse_floats(self.U_guess_grid))

        if min(self.d, self.n_S, self.n_T) < 1:
            raise ConfigInvalid("dimensions must be positive")
        if self.replications < 1:
            raise ConfigInvalid("replications must be at least 1")
        if self.sigma_S2 <= 0 or self.sigma_T2 <= 0:
            raise ConfigInvalid("noise variances must be positive")
        if self.U_true < 0:
            raise ConfigInvalid("U_true must be non-negative")
        if not self.estimator_set:
            raise ConfigInvalid("estimator_set is empty")
        unknown = [e for e in self.estimator_set if e not in ESTIMATORS]
        if unknown:
            raise ConfigInvalid(f"unknown estimators {unknown}; choose from {ESTIMATORS}")
        if self.U_guess_grid is not None and len(self.U_guess_grid) == 0:
            raise ConfigInvalid("U_guess_grid is empty")
        if self.tuning_mode not in TUNING_MODES:
            raise ConfigInvalid(f"tuning_mode must be one of {TUNING_MODES}")
        if self.adversary not in ADVERSARIES:
            raise ConfigInvalid(f"adversary must be one of {ADVERSARIES}")
        if self.target_basis not in TARGET_BASES:
            raise ConfigInvalid(f"target_basis must be one of {TARGET_BASES}")
        if self.cv_folds < 2 or self.cv_grid_size < 1 or self.lasso_grid_size < 1:
            raise ConfigInvalid("invalid cross-validation settings")
        if self.n_jobs < 1:
            raise ConfigInvalid("n_jobs must be at least 1")
        resolve_beta(self.beta_T_spec, self.d)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


FIELD_NAMES = tuple(f.name for f in dataclasses.fields(ScenarioConfig))


def parse_config_text(text):
    """Parse ``key = value`` lines (``#`` starts a comment) into a dict of strings."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigInvalid(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in FIELD_NAMES:
            raise ConfigInvalid(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigInvalid(f"line {lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def load_config(path=None, overrides=None):
    """Build a :class:`ScenarioConfig` from a file plus overriding values."""
    values = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            values.update(parse_config_text(fh.read()))
    for key, value in (overrides or {}).items():
        if key not in FIELD_NAMES:
            raise ConfigInvalid(f"unknown key {key!r}")
        if value is not None:
            values[key] = value
    return ScenarioConfig(**values)


def format_config(config):
    """Serialize a config in the file format (round-trips through :func:`load_config`)."""
    lines = []
    for name in FIELD_NAMES:
        value = getattr(config, name)
        if value is None:
            continue
        if isinstance(value, tuple):
            value = ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
        lines.append(f"{name} = {value}")
    return "\n".join(lines) + "\n"
