"""
Run configuration for the command line: one validated object per invocation.
"""

from typing import List, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config.settings import settings

METHODS = ("moments", "truncated", "theorem1", "factorized", "mrl")
DEFAULT_METHODS = ["moments", "truncated"]

# per-method order caps
MAX_ORDER = 8
SIMPLEX_MAX_ORDER = 6
MRL_ORDERS = (3, 4)


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    dist_spec: str
    max_order: int = Field(4, ge=1, le=MAX_ORDER)
    methods: List[str] = Field(default_factory=lambda: list(DEFAULT_METHODS))
    eps_tail: float = Field(default_factory=lambda: settings.eps_tail, gt=0.0, lt=0.25)
    grid_points: int = Field(default_factory=lambda: settings.grid_points)
    output_format: Literal["json", "csv"] = "json"
    seed: int = 0
    rel_tol: float = Field(1e-3, gt=0.0)
    abs_tol: float = Field(1e-5, ge=0.0)

    @field_validator("dist_spec")
    @classmethod
    def _non_empty_spec(cls, value: str) -> str:
        value = value.strip()
        if not value:
            raise ValueError("dist_spec must not be empty")
        return value

    @field_validator("methods", mode="before")
    @classmethod
    def _split_methods(cls, value):
        if isinstance(value, str):
            value = [part.strip() for part in value.split(",") if part.strip()]
        return value

    @field_validator("methods")
    @classmethod
    def _known_methods(cls, value: List[str]) -> List[str]:
        unknown = [m for m in value if m not in METHODS]
        if unknown:
            raise ValueError(f"unknown methods {unknown}; choose from {', '.join(METHODS)}")
        if not value:
            raise ValueError("select at least one method")
        # keep the first occurrence of each method
        return list(dict.fromkeys(value))

    @field_validator("grid_points")
    @classmethod
    def _odd_grid(cls, value: int) -> int:
        if value < 1001 or value % 2 == 0:
            raise ValueError(f"grid_points must be odd and >= 1001, got {value}")
        return value

    @model_validator(mode="after")
    def _order_caps(self) -> "RunConfig":
        for method in ("theorem1", "factorized"):
            if method in self.methods and self.max_order > SIMPLEX_MAX_ORDER:
                raise ValueError(f"{method} supports max_order <= {SIMPLEX_MAX_ORDER}, got {self.max_order}")
        if "mrl" in self.methods and self.max_order not in MRL_ORDERS:
            raise ValueError(f"mrl needs max_order in {MRL_ORDERS}, got {self.max_order}")
        return self
