"""Benchmark synthesis: pick the 10 corruptions farthest from a reference set.

Pipeline: per-corruption severity groups are formed so their error spread
matches the reference benchmark's; candidate datasets (10 distinct
corruptions x 5 severities) are rejection-sampled under an average-error
constraint; each candidate member's distance to the nearest reference
corruption center is aggregated into per-corruption contributions; the
top 10 corruptions form the new benchmark, with severities chosen from
the candidate whose average error is closest to the reference.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import rng
from .errors import (
    CompositionError,
    CoverageError,
    DataError,
    DomainError,
    FeasibilityError,
)

log = logging.getLogger(__name__)

GROUP_SIZE = 5
CENTER_RANGE = (3, 8)  # all centers whose +-2 window stays within [1, 10]
HALF_SIZE = 5


@dataclass
class ErrorTable:
    """Externally supplied (corruption, severity) -> test error %."""

    entries: dict[tuple[str, int], float]
    baseline: str = ""

    def __post_init__(self):
        for (name, severity), err in self.entries.items():
            if not 0.0 <= err <= 100.0:
                raise DomainError(f"error out of [0,100] for {name}@{severity}: {err}")

    def corruptions(self) -> list[str]:
        return sorted({name for name, _ in self.entries})

    def severities(self, name: str) -> list[int]:
        return sorted(sev for n, sev in self.entries if n == name)

    def average(self) -> float:
        if not self.entries:
            raise DomainError("error table is empty")
        return float(np.mean(list(self.entries.values())))

    def mean_spread(self) -> float:
        """Mean over corruptions of (max - min) error across severities."""
        spreads = []
        for name in self.corruptions():
            errs = [self.entries[(name, s)] for s in self.severities(name)]
            spreads.append(max(errs) - min(errs))
        if not spreads:
            raise DomainError("error table is empty")
        return float(np.mean(spreads))


def read_error_table(path) -> ErrorTable:
    """Parse `corruption,severity,error` rows; `# baseline:` comment kept."""
    entries = {}
    baseline = ""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read error table {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line[1:].strip().lower().startswith("baseline:"):
                baseline = line.split(":", 1)[1].strip()
            continue
        parts = [p.strip() for p in line.split(",")]
        if parts == ["corruption", "severity", "error"]:
            continue
        if len(parts) != 3:
            raise DataError(f"{path}:{lineno}: expected 3 fields, got {len(parts)}")
        try:
            entries[(parts[0], int(parts[1]))] = float(parts[2])
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from exc
    return ErrorTable(entries=entries, baseline=baseline)


def write_error_table(path, table: ErrorTable) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if table.baseline:
            fh.write(f"# baseline: {table.baseline}\n")
        fh.write("corruption,severity,error\n")
        for (name, severity), err in sorted(table.entries.items()):
            fh.write(f"{name},{severity},{err}\n")


@dataclass(frozen=True)
class SeverityGroup:
    """Five consecutive severities of one corruption."""

    name: str
    center: int
    severities: tuple[int, ...] = ()
    avg_error: float = 0.0
    spread: float = 0.0

    def members(self) -> list[tuple[str, int]]:
        return [(self.name, s) for s in self.severities]


@dataclass(frozen=True)
class CandidateDataset:
    """Ten severity groups over ten distinct corruptions."""

    groups: tuple[SeverityGroup, ...]
    avg_error: float

    def names(self) -> frozenset[str]:
        return frozenset(g.name for g in self.groups)

    def members(self) -> list[tuple[str, int]]:
        return [m for g in self.groups for m in g.members()]

    def severity_vector(self) -> tuple[tuple[str, int], ...]:
        return tuple(sorted((g.name, g.center) for g in self.groups))


@dataclass
class ContributionRanking:
    """Per-corruption mean min-distance term, over the population std."""

    raw: dict[str, float]
    normalized: dict[str, float]
    population_std: float

    def ranked(self) -> list[str]:
        return sorted(self.normalized, key=lambda n: (-self.normalized[n], n))

    def top(self, k: int) -> list[str]:
        names = self.ranked()
        if len(names) < k:
            raise DomainError(f"only {len(names)} ranked corruptions, need {k}")
        return names[:k]


def form_severity_groups(
    error_table: ErrorTable,
    spread_target: float,
    band: float = 0.5,
    severity_max: int = 10,
) -> list[SeverityGroup]:
    """All centered 5-severity windows whose error spread is within
    ``band`` (fractionally) of spread_target."""
    if spread_target < 0:
        raise DomainError("spread_target must be >= 0")
    groups = []
    for name in error_table.corruptions():
        have = set(error_table.severities(name))
        missing = set(range(1, severity_max + 1)) - have
        if missing:
            raise CoverageError(f"{name}: missing severities {sorted(missing)}")
        for center in range(CENTER_RANGE[0], CENTER_RANGE[1] + 1):
            sevs = tuple(range(center - 2, center + 3))
            errs = [error_table.entries[(name, s)] for s in sevs]
            spread = max(errs) - min(errs)
            if abs(spread - spread_target) <= band * spread_target:
                groups.append(
                    SeverityGroup(
                        name=name,
                        center=center,
                        severities=sevs,
                        avg_error=float(np.mean(errs)),
                        spread=float(spread),
                    )
                )
    return groups


def _sample_half(
    names: list[str],
    by_name: dict[str, list[SeverityGroup]],
    reference_avg: float,
    tolerance: float,
    stream: np.random.Generator,
    tries: int,
) -> tuple[Optional[list[SeverityGroup]], float]:
    """One severity assignment for 5 corruptions whose mean error is within
    tolerance of the reference; returns (groups or None, nearest gap)."""
    nearest = np.inf
    for _ in range(tries):
        chosen = [by_name[n][int(stream.integers(len(by_name[n])))] for n in names]
        avg = float(np.mean([g.avg_error for g in chosen]))
        gap = abs(avg - reference_avg)
        nearest = min(nearest, gap)
        if gap <= tolerance:
            return chosen, gap
    return None, nearest


def sample_candidates(
    groups: Sequence[SeverityGroup],
    error_table: ErrorTable,
    reference_avg: float,
    tolerance: float,
    n_candidates: int,
    seed: int,
    attempt_budget: Optional[int] = None,
    half_tries: int = 25,
) -> tuple[list[CandidateDataset], dict]:
    """Rejection-sample candidate datasets under the error constraint.

    Each attempt draws 10 distinct corruptions, splits them into two
    disjoint halves of 5, and randomizes each half's severity choice until
    the half's average error is within tolerance of the reference (which
    makes the full candidate's average satisfy the same bound).  Emits
    exactly n_candidates, or whatever was found within the attempt budget
    together with a shortfall report.
    """
    if n_candidates < 1:
        raise DomainError("n_candidates must be >= 1")
    by_name: dict[str, list[SeverityGroup]] = {}
    for g in groups:
        by_name.setdefault(g.name, []).append(g)
    names = sorted(by_name)
    if len(names) < 2 * HALF_SIZE:
        raise DomainError(
            f"need >= {2 * HALF_SIZE} corruptions with severity groups, have {len(names)}"
        )
    if attempt_budget is None:
        attempt_budget = 100 * n_candidates
    stream = rng.generator(seed, "candidate-sampling")
    candidates: list[CandidateDataset] = []
    nearest = np.inf
    attempts = 0
    while len(candidates) < n_candidates and attempts < attempt_budget:
        attempts += 1
        picked = [names[i] for i in stream.choice(len(names), 2 * HALF_SIZE, replace=False)]
        half_a, gap_a = _sample_half(
            picked[:HALF_SIZE], by_name, reference_avg, tolerance, stream, half_tries
        )
        half_b, gap_b = _sample_half(
            picked[HALF_SIZE:], by_name, reference_avg, tolerance, stream, half_tries
        )
        nearest = min(nearest, gap_a, gap_b)
        if half_a is None or half_b is None:
            continue
        chosen = tuple(sorted(half_a + half_b, key=lambda g: g.name))
        avg = float(np.mean([error_table.entries[m] for g in chosen for m in g.members()]))
        nearest = min(nearest, abs(avg - reference_avg))
        if abs(avg - reference_avg) > tolerance:
            continue
        candidates.append(CandidateDataset(groups=chosen, avg_error=avg))
    report = {
        "requested": n_candidates,
        "emitted": len(candidates),
        "attempts": attempts,
        "nearest_gap": None if np.isinf(nearest) else float(nearest),
    }
    if not candidates:
        raise FeasibilityError(
            f"no candidate satisfied |avg - {reference_avg:.3f}| <= {tolerance}; "
            f"nearest achievable gap was {nearest:.3f}",
            nearest=None if np.isinf(nearest) else float(nearest),
        )
    if len(candidates) < n_candidates:
        log.warning(
            "candidate shortfall: %d of %d within %d attempts",
            len(candidates), n_candidates, attempts,
        )
    return candidates, report


def member_min_distances(
    members: Sequence[tuple[str, int]],
    new_centers: dict[tuple[str, int], np.ndarray],
    reference_centers: np.ndarray,
) -> dict[tuple[str, int], float]:
    """Min distance from each (corruption, severity) center to any reference center."""
    reference_centers = np.atleast_2d(np.asarray(reference_centers, dtype=np.float64))
    if len(reference_centers) == 0:
        raise DomainError("need at least one reference center")
    terms = {}
    for member in members:
        if member in terms:
            continue
        if member not in new_centers:
            raise CoverageError(f"missing feature center for {member[0]}@{member[1]}")
        vec = np.asarray(new_centers[member], dtype=np.float64)
        terms[member] = float(
            np.linalg.norm(reference_centers - vec, axis=1).min()
        )
    return terms


def dataset_distance(
    candidate: CandidateDataset,
    new_centers: dict[tuple[str, int], np.ndarray],
    reference_centers: np.ndarray,
) -> float:
    """Mean over the candidate's members of the min distance to any reference."""
    members = candidate.members()
    terms = member_min_distances(members, new_centers, reference_centers)
    return float(np.mean([terms[m] for m in members]))


def rank_contributions(
    candidates: Sequence[CandidateDataset],
    member_terms: dict[tuple[str, int], float],
) -> ContributionRanking:
    """Average each corruption's min-distance terms over all candidate
    members featuring it, normalized by the population std of all terms."""
    if not candidates:
        raise DomainError("need at least one candidate")
    per_name: dict[str, list[float]] = {}
    population: list[float] = []
    for cand in candidates:
        for name, sev in cand.members():
            if (name, sev) not in member_terms:
                raise CoverageError(f"missing distance term for {name}@{sev}")
            term = member_terms[(name, sev)]
            per_name.setdefault(name, []).append(term)
            population.append(term)
    raw = {name: float(np.mean(vals)) for name, vals in per_name.items()}
    pop_std = float(np.std(population))
    if pop_std > 0.0:
        normalized = {name: val / pop_std for name, val in raw.items()}
    else:
        normalized = {name: 0.0 for name in raw}  # all members equidistant
    return ContributionRanking(raw=raw, normalized=normalized, population_std=pop_std)


def average_rankings(rankings: Sequence[ContributionRanking]) -> ContributionRanking:
    """Mean the normalized contributions across repeated runs."""
    if not rankings:
        raise DomainError("need at least one ranking")
    names = sorted({n for r in rankings for n in r.normalized})
    raw = {}
    normalized = {}
    for name in names:
        raws = [r.raw[name] for r in rankings if name in r.raw]
        norms = [r.normalized[name] for r in rankings if name in r.normalized]
        raw[name] = float(np.mean(raws))
        normalized[name] = float(np.mean(norms))
    pop_std = float(np.mean([r.population_std for r in rankings]))
    return ContributionRanking(raw=raw, normalized=normalized, population_std=pop_std)


def select_benchmark(
    ranking: ContributionRanking,
    candidates: Sequence[CandidateDataset],
    error_table: ErrorTable,
    reference_avg: float,
    k: int = 10,
) -> CandidateDataset:
    """Among candidates composed of exactly the top-k corruptions, return
    the one with average error closest to the reference (ties broken by
    lexicographic severity vector)."""
    top = frozenset(ranking.top(k))
    matching = [c for c in candidates if c.names() == top]
    if not matching:
        raise CompositionError(
            f"no candidate is composed of exactly the top-{k} corruptions"
        )
    return min(
        matching, key=lambda c: (abs(c.avg_error - reference_avg), c.severity_vector())
    )


@dataclass
class BenchmarkResult:
    selected: CandidateDataset
    ranking: ContributionRanking
    reference_avg: float
    tolerance: float
    reports: list[dict] = field(default_factory=list)
    resampled: bool = False

    def manifest(self) -> dict:
        return {
            "reference_avg_error": self.reference_avg,
            "benchmark_avg_error": self.selected.avg_error,
            "tolerance": self.tolerance,
            "resampled_for_composition": self.resampled,
            "corruptions": [
                {
                    "name": g.name,
                    "center": g.center,
                    "severities": list(g.severities),
                    "avg_error": g.avg_error,
                    "contribution": self.ranking.normalized[g.name],
                }
                for g in self.selected.groups
            ],
        }


def build_benchmark(
    new_table: ErrorTable,
    reference_table: ErrorTable,
    new_centers: dict[tuple[str, int], np.ndarray],
    reference_centers: np.ndarray,
    n_candidates: int,
    tolerance: float = 1.0,
    n_runs: int = 5,
    seed: int = 0,
    spread_target: Optional[float] = None,
    spread_band: float = 0.5,
    k: int = 10,
) -> BenchmarkResult:
    """Full construction: groups -> candidates -> contributions -> selection.

    Contribution rankings from n_runs independent candidate sets are
    averaged.  If no sampled candidate happens to consist of exactly the
    top-k corruptions, candidates are resampled restricted to those k.
    """
    reference_avg = reference_table.average()
    if spread_target is None:
        spread_target = reference_table.mean_spread()
    groups = form_severity_groups(new_table, spread_target, band=spread_band)
    all_members = sorted({m for g in groups for m in g.members()})
    member_terms = member_min_distances(all_members, new_centers, reference_centers)

    rankings = []
    all_candidates: list[CandidateDataset] = []
    reports = []
    for run in range(n_runs):
        cands, report = sample_candidates(
            groups,
            new_table,
            reference_avg,
            tolerance,
            n_candidates,
            seed=rng.derive_seed(seed, "builder-run", run),
        )
        rankings.append(rank_contributions(cands, member_terms))
        all_candidates.extend(cands)
        reports.append(report)
    ranking = average_rankings(rankings)

    resampled = False
    try:
        selected = select_benchmark(ranking, all_candidates, new_table, reference_avg, k=k)
    except CompositionError:
        resampled = True
        top = set(ranking.top(k))
        top_groups = [g for g in groups if g.name in top]
        cands, report = sample_candidates(
            top_groups,
            new_table,
            reference_avg,
            tolerance,
            max(n_candidates, 100),
            seed=rng.derive_seed(seed, "builder-resample"),
        )
        reports.append(report)
        selected = select_benchmark(ranking, cands, new_table, reference_avg, k=k)

    return BenchmarkResult(
        selected=selected,
        ranking=ranking,
        reference_avg=reference_avg,
        tolerance=tolerance,
        reports=reports,
        resampled=resampled,
    )


def write_benchmark_manifest(path, result: BenchmarkResult) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(result.manifest(), fh, indent=2, sort_keys=True)
        fh.write("\n")
