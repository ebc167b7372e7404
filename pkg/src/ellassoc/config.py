"""Run configuration: dataclass of every knob, merged from a TOML file and
explicit command-line flags (flags win)."""

from __future__ import annotations

from dataclasses import dataclass, field, fields

try:
    import tomllib  # py >= 3.11
except ModuleNotFoundError:  # pragma: no cover - py 3.10 path
    import tomli as tomllib

from .monodromy import Conventions


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass
class RunConfig:
    command: str = ""
    preset: str = ""
    M: int = 1
    N: int = 1
    tau: complex = 1j
    cutoff: int = 3
    eps_schedule: tuple = (1e-2, 1e-3, 1e-4)
    precision: str = "extended"
    kz_order: str = "g0_inv_g1"
    b_exponent_sign: int = -1
    prefactor: str = "covariant"
    renormalize: bool = True
    seed: int = 0
    out: str = ""
    assert_relations: str = ""
    tol: float = 1e-6

    def conventions(self) -> Conventions:
        return Conventions(kz_order=self.kz_order,
                           b_exponent_sign=self.b_exponent_sign,
                           prefactor=self.prefactor,
                           renormalize=self.renormalize)

    def validate(self):
        if self.M < 1 or self.N < 1:
            raise ConfigError("M and N must be positive")
        if self.tau.imag <= 0:
            raise ConfigError("tau must have positive imaginary part")
        if self.cutoff < 1:
            raise ConfigError("cutoff must be >= 1")
        if self.precision not in ("double", "extended"):
            raise ConfigError("precision must be 'double' or 'extended'")
        if self.kz_order not in ("g0_inv_g1", "g1_inv_g0", "g0_g1_inv"):
            raise ConfigError(f"unknown kz_order {self.kz_order!r}")
        if self.prefactor not in ("covariant", "integer", "none"):
            raise ConfigError(f"unknown prefactor mode {self.prefactor!r}")
        return self


def parse_tau(text: str) -> complex:
    """Accepts '0+1i'/'0.5+1j'/'1j' style strings."""
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise ConfigError(f"cannot parse tau from {text!r}") from exc


def parse_eps(text: str) -> tuple:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"cannot parse eps schedule from {text!r}") from exc
    if not vals or any(v <= 0 for v in vals):
        raise ConfigError("eps schedule must be positive floats")
    return vals


def load_config(path: str | None, overrides: dict) -> RunConfig:
    """TOML values first, explicit (non-None) overrides on top."""
    cfg = RunConfig()
    data = {}
    if path:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    known = {f.name for f in fields(RunConfig)}
    for key, val in data.items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        if key == "tau" and isinstance(val, str):
            val = parse_tau(val)
        if key == "eps_schedule" and isinstance(val, (list, str)):
            val = parse_eps(",".join(map(str, val)) if isinstance(val, list) else val)
        setattr(cfg, key, val)
    for key, val in overrides.items():
        if val is not None:
            setattr(cfg, key, val)
    return cfg.validate()
