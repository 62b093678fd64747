"""Tunable constants and run configuration."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, replace

ALGORITHMS = ("general", "spine", "linear", "unweighted", "chain")


@dataclass(frozen=True)
class Constants:
    C_s: float = 4.0  # sampling constant in q = C_s t ln t / eps^2
    c_jl: float = 24.0  # projection rows k = c_jl ln n / eps_jl^2
    c_rho: float = 8.0  # cut sparsifier keep rate p = c_rho ln n / S
    c_scale: float = 1.0  # cut sparsifier tree boost S = c_scale ln^2 n
    c_kappa1: float = 1.0  # kappa_1 = c_kappa1 ln^5 n
    c_kappa2: float = 1.0  # kappa_2 = c_kappa2 ln^3 n
    c_spine: float = 1.0  # spine boost ceil(c_spine st log2 n / m)
    eps_resistance: float = 0.5  # relative accuracy of resistance estimates
    eps_incremental: float = 1.0 / 3.0  # sampling accuracy inside incremental sparsifiers

    def with_overrides(self, overrides: dict) -> "Constants":
        known = {f.name for f in fields(self)}
        bad = sorted(set(overrides) - known)
        if bad:
            raise KeyError(f"unknown constant(s): {', '.join(bad)}")
        out = replace(self, **{k: float(v) for k, v in overrides.items()})
        if not 0 < out.eps_resistance < 1 or not 0 < out.eps_incremental < 1:
            raise ValueError("accuracy constants must lie in (0, 1)")
        return out

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RunConfig:
    epsilon: float = 0.5
    algorithm: str = "general"
    seed: int = 0
    solver: str = "pcg-tree"
    verify: bool = False
    constants: Constants = field(default_factory=Constants)
    output: str | None = None

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        known = {f.name for f in fields(cls)}
        consts = d.pop("constants", {}) or {}
        bad = sorted(set(d) - known)
        if bad:
            raise KeyError(f"unknown config key(s): {', '.join(bad)}")
        if isinstance(consts, dict):
            consts = Constants().with_overrides(consts)
        return cls(constants=consts, **d)
