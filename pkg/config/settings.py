import os
from typing import Optional

from dotenv import load_dotenv

load_dotenv()


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    return float(raw) if raw not in (None, "") else default


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    return int(raw) if raw not in (None, "") else default


class Settings:
    """Numerical defaults for cumulant computations, overridable via environment"""

    def __init__(self):
        # Univariate truncation and quadrature
        self.eps_tail = _env_float("CUMULANT_KIT_EPS_TAIL", 1e-10)
        self.grid_points = _env_int("CUMULANT_KIT_GRID_POINTS", 20001)
        self.eps_guard = _env_float("CUMULANT_KIT_EPS_GUARD", 1e-12)

        # Multivariate tensor grids
        self.joint_eps_tail = _env_float("CUMULANT_KIT_JOINT_EPS_TAIL", 1e-8)
        self.joint_points = {2: 201, 3: 101}
        self.max_tensor_cells = _env_int("CUMULANT_KIT_MAX_TENSOR_CELLS", 5_000_000)

        # Runtime
        self.threads = _env_int("CUMULANT_KIT_THREADS", 0)  # 0 = auto
        self.log_level = os.getenv("CUMULANT_KIT_LOG_LEVEL", "WARNING")

    def worker_count(self) -> Optional[int]:
        """Thread pool size; None lets the executor pick"""
        return self.threads if self.threads > 0 else None


# Global settings instance
settings = Settings()
