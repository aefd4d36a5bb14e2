"""
Batch Planning
Evaluates a stream of area records, keeping input order, and summarizes the
classifications per threshold and plan year. Malformed rows are reported with
their line numbers and skipped.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union
import logging

from src.planning.planner import CLASSIFICATIONS, PlanVerdict, evaluate_area
from src.planning.records import AreaRecord, GrowthModel, TargetThreshold
from src.utils.validation import AccessModelError, MalformedRecordError

logger = logging.getLogger(__name__)

Entry = Tuple[Optional[int], Union[AreaRecord, MalformedRecordError]]


@dataclass
class BatchResult:
    verdicts: List[PlanVerdict] = field(default_factory=list)
    summary: Dict[str, Dict[int, Dict[str, int]]] = field(default_factory=dict)
    malformed: List[Tuple[Optional[int], str]] = field(default_factory=list)
    duplicates: List[str] = field(default_factory=list)

    def summary_rows(self) -> List[dict]:
        rows = []
        for threshold, per_year in self.summary.items():
            for offset, counts in sorted(per_year.items()):
                rows.append({"threshold": threshold, "year_offset": offset, **counts})
        return rows


def _empty_summary(thresholds: Sequence[TargetThreshold], growth: GrowthModel):
    return {
        t.name: {
            offset: {c: 0 for c in CLASSIFICATIONS}
            for offset in range(growth.horizon_years + 1)
        }
        for t in thresholds
    }


def _normalize(records: Iterable[Union[AreaRecord, Entry]]) -> List[Entry]:
    entries = []
    for item in records:
        if isinstance(item, AreaRecord):
            entries.append((item.line, item))
        else:
            entries.append(item)
    return entries


def evaluate_batch(
    records: Iterable[Union[AreaRecord, Entry]],
    thresholds: Sequence[TargetThreshold],
    growth: GrowthModel,
    workers: int = 1,
) -> BatchResult:
    """
    Evaluate every record; output order follows input order.

    Args:
        records: AreaRecords, or (line, AreaRecord | MalformedRecordError) entries
        thresholds: Thresholds to classify against
        growth: Growth assumptions shared by all records
        workers: Worker threads (results are re-ordered by record index)

    Returns:
        BatchResult with verdicts, summary counts, malformed rows and duplicate ids
    """
    entries = _normalize(records)
    result = BatchResult(summary=_empty_summary(thresholds, growth))

    seen = set()
    valid: List[AreaRecord] = []
    for line, item in entries:
        if isinstance(item, MalformedRecordError):
            logger.warning(f"Skipping malformed row: {item}")
            result.malformed.append((line, str(item)))
            continue
        if item.area_id in seen:
            logger.warning(f"Duplicate area_id '{item.area_id}' (line {line}); evaluating both")
            result.duplicates.append(item.area_id)
        seen.add(item.area_id)
        valid.append(item)

    def evaluate(record: AreaRecord):
        try:
            return evaluate_area(record, thresholds, growth)
        except AccessModelError as e:
            return MalformedRecordError(str(e), record.line)

    if workers > 1 and len(valid) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            outcomes = list(executor.map(evaluate, valid))
    else:
        outcomes = [evaluate(record) for record in valid]

    for record, outcome in zip(valid, outcomes):
        if isinstance(outcome, MalformedRecordError):
            logger.warning(f"Skipping row: {outcome}")
            result.malformed.append((record.line, str(outcome)))
            continue
        result.verdicts.append(outcome)
        for year in outcome.years:
            for name, classification in year.classification.items():
                result.summary[name][year.offset][classification] += 1

    result.malformed.sort(key=lambda item: (item[0] is None, item[0] or 0))
    logger.info(
        f"Evaluated {len(result.verdicts)} areas, {len(result.malformed)} malformed rows, "
        f"{len(result.duplicates)} duplicate ids"
    )
    return result
