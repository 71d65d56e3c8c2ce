"""Random-architecture baseline under a latency constraint.

Sampling is uniform per layer with rejection of over-budget draws. The
generator is SplitMix64 (Steele, Lea & Flood's 64-bit mixer: state
advances by 0x9E3779B97F4A7C15, output is murmur-style xor-shift
mixing), chosen because it is trivially portable: any implementation in
any language reproduces the same population from the same seed. Sample
i draws from its own stream seeded with (seed XOR i), so parallel and
serial runs agree draw for draw.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    Budget,
    SearchInstance,
    Selection,
    cost as core_cost,
    objective as core_objective,
    validate_instance,
)
from .lut_io import InstanceValidationError

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SamplingError(RuntimeError):
    """No feasible draw within the attempt limit."""

    def __init__(self, message: str, attempts: int):
        super().__init__(message)
        self.attempts = attempts


@dataclass(frozen=True)
class SamplerConfig:
    seed: int
    max_attempts_per_sample: int = 10000

    def __post_init__(self) -> None:
        if self.max_attempts_per_sample < 1:
            raise ValueError("max_attempts_per_sample must be >= 1")


class SplitMix64:
    """The documented baseline generator; see module docstring."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def randbelow(self, n: int) -> int:
        """Uniform int in [0, n) via the multiply-shift reduction."""
        return (self.next_u64() * n) >> 64


@dataclass(frozen=True)
class SampleRecord:
    sample_index: int
    selection: Selection
    objective: float
    cost_ms: float


@dataclass(frozen=True)
class RandomSearchResult:
    """Population of feasible random draws plus the best one found."""

    best: Selection
    population: tuple[float, ...]
    records: tuple[SampleRecord, ...]
    failures: int


def sample_feasible(
    instance: SearchInstance,
    budget: Budget,
    config: SamplerConfig,
    sample_index: int = 0,
) -> Selection:
    """One uniform per-layer draw, rejected and retried until the cost
    fits the budget. Deterministic given (seed, sample_index)."""
    rng = SplitMix64((config.seed ^ sample_index) & _MASK)
    sizes = [len(layer.ops) for layer in instance.layers]
    for _ in range(config.max_attempts_per_sample):
        sel = Selection(tuple(rng.randbelow(m) for m in sizes))
        if core_cost(instance, sel) <= budget.limit:
            return sel
    raise SamplingError(
        f"no feasible draw within {config.max_attempts_per_sample} attempts "
        f"(sample {sample_index}, budget {budget.limit} ms)",
        attempts=config.max_attempts_per_sample,
    )


def random_search(
    instance: SearchInstance,
    budget: Budget,
    n_samples: int,
    config: SamplerConfig,
) -> RandomSearchResult:
    """Draw n_samples feasible architectures and keep the population.

    Samples whose attempt budget runs out are counted as failures and
    skipped; it is an error for every sample to fail. The best draw uses
    the solver's tie-break: objective, then cost, then choices.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    violations = validate_instance(instance)
    if violations:
        raise InstanceValidationError(violations)
    records: list[SampleRecord] = []
    failures = 0
    for i in range(n_samples):
        try:
            sel = sample_feasible(instance, budget, config, sample_index=i)
        except SamplingError:
            failures += 1
            continue
        records.append(
            SampleRecord(
                sample_index=i,
                selection=sel,
                objective=core_objective(instance, sel),
                cost_ms=core_cost(instance, sel),
            )
        )
    if not records:
        raise SamplingError(
            f"all {n_samples} samples failed within "
            f"{config.max_attempts_per_sample} attempts each",
            attempts=n_samples * config.max_attempts_per_sample,
        )
    best = min(records, key=lambda r: (r.objective, r.cost_ms, r.selection.choices))
    return RandomSearchResult(
        best=best.selection,
        population=tuple(r.objective for r in records),
        records=tuple(records),
        failures=failures,
    )
