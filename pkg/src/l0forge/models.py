import dataclasses
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Callable

import numpy as np
from numpy.typing import NDArray
from peewee import (
    AutoField,
    CharField,
    DateTimeField,
    FloatField,
    IntegerField,
    Model,
    SqliteDatabase,
)

from l0forge.exceptions import InvalidInput

Vector = NDArray[np.float64]
Matrix = NDArray[np.float64]

# initialized lazily by db.migrate() so importing the package never touches the cache dir
db = SqliteDatabase(None)


class BaseModel(Model):
    class Meta:
        database = db


class DbMetadata(BaseModel):
    version = IntegerField(primary_key=True)
    migrated_at = DateTimeField(default=datetime.now)

    class Meta:
        table_name = "metadata"


class RunHistory(BaseModel):
    id = AutoField()
    command = CharField()
    method = CharField(null=True)
    n = IntegerField(null=True)
    seed = IntegerField(null=True)
    lam = FloatField(null=True)
    iterations = IntegerField(null=True)
    wall_time = FloatField(null=True)
    stop_reason = CharField(null=True)
    exit_status = IntegerField(null=False)
    ran_at = DateTimeField(default=datetime.now, null=False)

    class Meta:
        table_name = "run_history"


@dataclass(frozen=True)
class Migration:
    version: int
    migrate: Callable[[], None]


class StopReason(Enum):
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"


class MetricMode(Enum):
    AUTO = "auto"
    QUADRATIC = "quadratic"
    GENERAL = "general"


class Ensemble(Enum):
    GAUSSIAN = "gaussian"
    BERNOULLI = "bernoulli"


class NoiseMode(Enum):
    VARIANCE = "variance"
    STD = "std"


class Selection(Enum):
    TRUTH = "truth"
    SPARSITY = "sparsity"


@dataclass(frozen=True)
class SupportSet:
    """Zero set I(x) of a vector of length `dimension`; its complement is the support proper."""

    zero_indices: tuple[int, ...]
    dimension: int

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.zero_indices, self.zero_indices[1:])):
            raise InvalidInput("zero indices must be strictly increasing")
        if self.zero_indices and (self.zero_indices[0] < 0 or self.zero_indices[-1] >= self.dimension):
            raise InvalidInput(f"zero indices out of range for dimension {self.dimension}")

    @property
    def mask(self) -> NDArray[np.bool_]:
        mask = np.zeros(self.dimension, dtype=bool)
        mask[list(self.zero_indices)] = True
        return mask


@dataclass(frozen=True)
class Certificate:
    grad_residual: float
    # None when x has no nonzero entries
    magnitude_gap: float | None
    fixed_point: bool
    passed: bool


@dataclass(frozen=True)
class StepConfig:
    gamma_bt: float = 0.5
    delta: float = 0.1
    max_backtracks: int = 60

    def __post_init__(self):
        if not 0.0 < self.gamma_bt < 1.0:
            raise InvalidInput(f"backtracking factor must lie in (0, 1), got {self.gamma_bt}")
        if not 0.0 < self.delta < 1.0:
            raise InvalidInput(f"acceptance factor must lie in (0, 1), got {self.delta}")
        if self.max_backtracks < 1:
            raise InvalidInput("max_backtracks must be positive")


@dataclass(frozen=True, eq=False)
class StepResult:
    alpha: float
    trial_point: Vector
    evaluations: int


@dataclass(frozen=True, eq=False)
class MetricState:
    pairs: tuple[tuple[Vector, Vector], ...] = ()
    capacity: int = 6
    damping: float = 1e-6
    frozen: bool = False
    freeze_after: int | None = None

    def __post_init__(self):
        if self.capacity < 1:
            raise InvalidInput("metric memory capacity must be positive")
        if self.damping <= 0:
            raise InvalidInput("metric damping must be positive")


@dataclass(frozen=True)
class VmepihtOptions:
    memory: int = 6
    damping: float = 1e-6
    # None picks by mode: never for quadratic f, 50 iterations for general f; negative never freezes
    freeze_after: int | None = None
    mode: MetricMode = MetricMode.AUTO
    use_metric: bool = True
    step: StepConfig = field(default_factory=StepConfig)


@dataclass(frozen=True)
class NpihtOptions:
    omega: float = 0.9999


@dataclass(frozen=True)
class NmapgOptions:
    eta: float = 0.1
    delta: float = 1e-4


@dataclass(frozen=True)
class NiapgOptions:
    window: int = 2


@dataclass(frozen=True)
class SolveOptions:
    tol: float = 1e-5
    max_iters: int = 5000
    mu: float = 1e-6
    trace_level: int = 0
    vmepiht: VmepihtOptions = field(default_factory=VmepihtOptions)
    npiht: NpihtOptions = field(default_factory=NpihtOptions)
    nmapg: NmapgOptions = field(default_factory=NmapgOptions)
    niapg: NiapgOptions = field(default_factory=NiapgOptions)

    def __post_init__(self):
        if self.tol <= 0:
            raise InvalidInput(f"tol must be positive, got {self.tol}")
        if self.max_iters < 1:
            raise InvalidInput(f"max_iters must be at least 1, got {self.max_iters}")
        if self.mu <= 0:
            raise InvalidInput(f"mu must be positive, got {self.mu}")
        if self.niapg.window < 0:
            raise InvalidInput("niAPG window must be nonnegative")


@dataclass(frozen=True, eq=False)
class RunRecord:
    method: str
    iterations: int
    wall_time: float
    objective_trajectory: list[float]
    support: tuple[int, ...]
    certificate: Certificate
    stop_reason: StopReason
    # filled only for trace_level >= 2: x_k and the anchor a_k of the stopping rule
    iterates: list[Vector] = field(default_factory=list)
    anchors: list[Vector] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        record = {
            "method": self.method,
            "iterations": self.iterations,
            "wall_time": self.wall_time,
            "objective_trajectory": self.objective_trajectory,
            "support": list(self.support),
            "nnz": len(self.support),
            "certificate": dataclasses.asdict(self.certificate),
            "stop_reason": self.stop_reason.value,
        }
        if self.iterates:
            record["iterates"] = [x.tolist() for x in self.iterates]
            record["anchors"] = [a.tolist() for a in self.anchors]
        return record


@dataclass(frozen=True)
class CsInstanceSpec:
    n: int
    m: int | None = None
    sparsity: int | None = None
    ensemble: Ensemble = Ensemble.GAUSSIAN
    noise_variance: float = 0.02
    noise_mode: NoiseMode = NoiseMode.VARIANCE
    # nonzeros of x* are sign(z) (min_magnitude + |z|), z standard normal
    min_magnitude: float = 0.0
    seed: int = 0

    @property
    def rows(self) -> int:
        return self.n // 4 if self.m is None else self.m

    @property
    def nonzeros(self) -> int:
        return self.rows // 32 if self.sparsity is None else self.sparsity

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInput("n must be positive")
        if not 1 <= self.nonzeros <= self.rows <= self.n:
            raise InvalidInput(f"need 1 <= s <= m <= n, got s={self.nonzeros}, m={self.rows}, n={self.n}")
        if self.noise_variance < 0:
            raise InvalidInput("noise variance must be nonnegative")
        if self.min_magnitude < 0:
            raise InvalidInput("minimum magnitude must be nonnegative")


@dataclass(frozen=True, eq=False)
class CsInstance:
    spec: CsInstanceSpec
    A: Matrix
    b: Vector
    x_true: Vector


@dataclass(frozen=True, eq=False)
class LambdaPath:
    anchor: float
    values: Vector


@dataclass(frozen=True)
class BenchRow:
    method: str
    n: int
    m: int
    sparsity: int
    seed: int
    lam: float | None
    iterations: int | None
    time_s: float | None
    rel_err: float | None
    support_match: bool | None
    stop_reason: str | None
    error: str | None = None


@dataclass(frozen=True)
class BenchReport:
    rows: tuple[BenchRow, ...]
    summary: tuple[dict[str, Any], ...]


@dataclass(frozen=True)
class BenchSettings:
    methods: tuple[str, ...] = ("vmepiht", "npiht", "nmapg", "niapg")
    path_length: int = 200
    path_ratio: float = 1e-10
    # 0 sweeps the whole path
    path_patience: int = 0
    selection: Selection = Selection.TRUTH
    threads: int = 0
    history: bool = True


@dataclass(frozen=True)
class Preset:
    sizes: tuple[int, ...]
    rows: int | None
    sparsity: int | None
    seeds: int
    ensemble: Ensemble
    noise_variance: float
    noise_mode: NoiseMode
    min_magnitude: float = 0.0

    def specs(self, first_seed: int = 0) -> list[CsInstanceSpec]:
        return [
            CsInstanceSpec(
                n=n,
                m=self.rows,
                sparsity=self.sparsity,
                ensemble=self.ensemble,
                noise_variance=self.noise_variance,
                noise_mode=self.noise_mode,
                min_magnitude=self.min_magnitude,
                seed=first_seed,
            )
            for n in self.sizes
        ]


@dataclass(frozen=True)
class Config:
    solve: SolveOptions
    bench: BenchSettings
    presets: dict[str, Preset]
    default_preset: str
