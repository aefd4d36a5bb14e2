"""
File Formats
Reading and writing the tool's tables and reports.

Tables are UTF-8 CSV with a header row ('.' decimal separator) or JSON
lists of records. Writers are deterministic: fixed column order, "\\n"
line endings, sorted JSON keys and no timestamps, so identical inputs give
byte-identical files.
"""

import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union
import logging

import numpy as np
import pandas as pd

from src.disciplines.registry import get_discipline
from src.model.formulas import mean_active_flows
from src.model.types import ClassMix
from src.planning.planner import PlanVerdict
from src.planning.records import DIRECTIONS
from src.probes.inference import InferenceReport, MeasuredSpeed
from src.probes.mcs import RateTable, map_mcs_to_rate
from src.simulation.stats import SimStats, occupancy_histogram
from src.utils.units import parse_rate, to_mbps
from src.utils.validation import (
    ConfigError, MalformedRecordError, UnknownMcsError, validate_table,
)

logger = logging.getLogger(__name__)

TABLE_FORMATS = ("csv", "json")

PREDICTION_COLUMNS = [
    "label", "discipline", "rho", "class_rho", "channel_rate", "reference_rate", "mean_size",
    "mean_transfer_time", "overall_transfer_time", "per_user_throughput",
    "conditional_time_per_bit", "mean_active_flows",
]
SIM_CLASS_COLUMNS = [
    "label", "completed", "mean_transfer_time", "transfer_time_half_width",
    "analytic_transfer_time", "relative_gap", "mean_throughput", "throughput_half_width",
    "throughput_ratio", "analytic_throughput", "mean_slowdown", "max_slowdown",
    "scheduler_share",
]
VERDICT_COLUMNS = [
    "area_id", "line", "threshold", "year", "year_offset", "classification", "binding_year",
    "down_rho", "up_rho", "down_rate_mbps", "up_rate_mbps",
    "down_floor_mbps", "up_floor_mbps", "down_required_mbps", "up_required_mbps",
    "down_nominal_mbps", "up_nominal_mbps",
    "down_contemporaneity_mbps", "up_contemporaneity_mbps",
]
INFERENCE_COLUMNS = [
    "line", "sample_id", "measured_speed", "channel_rate", "mcs", "rho", "consistent",
]


# ------------------------------------------------------------------ reading


def read_table(path: Union[str, Path], required_columns: Iterable[str] = (),
               name: Optional[str] = None) -> pd.DataFrame:
    """
    Read a CSV or JSON table with every cell kept as text.

    An empty file gives an empty table with the required columns. The file
    line of the first data row is stored in ``df.attrs["first_line"]``
    (2 for CSV, where the header is line 1; 1 for JSON record lists).

    Raises:
        ConfigError: If the file cannot be read or parsed
        MalformedRecordError: If a required column is missing
    """
    path = Path(path)
    name = name or path.name
    required_columns = list(required_columns)
    try:
        if path.stat().st_size == 0:
            logger.warning(f"{name} is empty")
            df = pd.DataFrame(columns=required_columns, dtype=str)
            df.attrs["first_line"] = 2
            return df
        if path.suffix.lower() == ".json":
            with open(path, "r", encoding="utf-8") as f:
                records = json.load(f)
            if not isinstance(records, list) or not all(isinstance(r, dict) for r in records):
                raise ConfigError(f"{name}: expected a JSON list of records")
            df = pd.DataFrame.from_records(records) if records \
                else pd.DataFrame(columns=required_columns)
            df.attrs["first_line"] = 1
        else:
            df = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
            df.attrs["first_line"] = 2
    except OSError as e:
        raise ConfigError(f"Cannot read {path}: {e}")
    except (ValueError, pd.errors.ParserError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot parse {path}: {e}")

    df.columns = [str(c).strip() for c in df.columns]
    validate_table(df, required_columns, name=name)
    logger.debug(f"Read {len(df)} rows from {path}")
    return df


def _blank(value: Any) -> bool:
    return value is None or (isinstance(value, float) and math.isnan(value)) \
        or (isinstance(value, str) and not value.strip())


def read_samples(df: pd.DataFrame, rate_table: Optional[RateTable] = None
                 ) -> List[Tuple[int, Union[MeasuredSpeed, MalformedRecordError]]]:
    """
    Parse speed-test sample rows.

    Each row needs ``measured_speed`` and either ``channel_rate`` or an
    ``mcs`` index resolved through the rate table; ``sample_id`` is optional.

    Returns:
        (line, MeasuredSpeed or MalformedRecordError) per row, in file order
    """
    if "measured_speed" not in df.columns or not (
        "channel_rate" in df.columns or "mcs" in df.columns
    ):
        raise MalformedRecordError(
            f"samples need a measured_speed column and a channel_rate or mcs column; "
            f"got {list(df.columns)}"
        )

    first_line = df.attrs.get("first_line", 2)
    entries = []
    for position, row in enumerate(df.to_dict(orient="records")):
        line = first_line + position
        try:
            entries.append((line, _sample(row, line, rate_table)))
        except MalformedRecordError as e:
            entries.append((line, e))
    return entries


def _sample(row: Mapping, line: int, rate_table: Optional[RateTable]) -> MeasuredSpeed:
    try:
        if _blank(row.get("measured_speed")):
            raise MalformedRecordError("measured_speed is empty", line)
        speed = parse_rate(row["measured_speed"])

        mcs_index = None
        if not _blank(row.get("mcs")):
            mcs_index = int(float(row["mcs"]))
        if not _blank(row.get("channel_rate")):
            channel_rate = parse_rate(row["channel_rate"])
        elif mcs_index is not None:
            if rate_table is None:
                raise MalformedRecordError(f"mcs {mcs_index} given but no rate table", line)
            channel_rate = map_mcs_to_rate(mcs_index, rate_table)
        else:
            raise MalformedRecordError("row has neither channel_rate nor mcs", line)
    except UnknownMcsError as e:
        raise MalformedRecordError(str(e), line)
    except (ConfigError, ValueError, TypeError) as e:
        raise MalformedRecordError(str(e), line)

    if not channel_rate > 0:
        raise MalformedRecordError(f"channel rate must be positive, got {channel_rate!r}", line)
    sample_id = None if _blank(row.get("sample_id")) else str(row["sample_id"]).strip()
    return MeasuredSpeed(speed, channel_rate, sample_id, mcs_index, line)


# ------------------------------------------------------------------ writing


def _plain(value: Any) -> Any:
    """JSON-safe copy: numpy scalars unwrapped, NaN and infinities as null."""
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if value is pd.NA:
        return None
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(obj: Any, path: Union[str, Path]) -> Path:
    """Write a JSON document with sorted keys."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(_plain(obj), f, indent=2, sort_keys=True, allow_nan=False)
        f.write("\n")
    return path


def table_path(out_dir: Union[str, Path], name: str, fmt: str) -> Path:
    if fmt not in TABLE_FORMATS:
        raise ConfigError(f"Unknown table format '{fmt}'. Available: {list(TABLE_FORMATS)}")
    return Path(out_dir) / f"{name}.{fmt}"


def write_table(df: pd.DataFrame, path: Union[str, Path], fmt: str = "csv") -> Path:
    """
    Write a table as CSV or as a JSON list of records.

    Floats keep their shortest round-trip representation, so a written
    table reads back to the same values.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        df.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    elif fmt == "json":
        records = [
            {column: row[column] for column in df.columns}
            for row in df.to_dict(orient="records")
        ]
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(_plain(records), f, indent=2, allow_nan=False)
            f.write("\n")
    else:
        raise ConfigError(f"Unknown table format '{fmt}'. Available: {list(TABLE_FORMATS)}")
    logger.debug(f"Wrote {len(df)} rows to {path}")
    return path


# ------------------------------------------------------------------ report rows


def prediction_rows(mix: ClassMix) -> pd.DataFrame:
    """
    Per-class closed-form prediction for a mix.

    Raises:
        UnstableLoadError: If the mix's utilization is >= 1
    """
    discipline = get_discipline(mix.channel.discipline)
    load = discipline.utilization(mix)
    predictions = discipline.predict(mix)

    total_rate = mix.total_arrival_rate
    overall = math.nan
    if total_rate > 0:
        overall = math.fsum(
            c.arrival_rate * predictions[c.label].mean_transfer_time for c in mix.classes
        ) / total_rate

    rows = []
    for user_class, class_rho in zip(mix.classes, load.per_class_rho):
        prediction = predictions[user_class.label]
        rows.append({
            "label": user_class.label,
            "discipline": discipline.discipline.value,
            "rho": load.rho,
            "class_rho": class_rho,
            "channel_rate": user_class.channel_rate,
            "reference_rate": discipline.reference_rate(mix.channel.capacity, user_class),
            "mean_size": user_class.mean_size,
            "mean_transfer_time": prediction.mean_transfer_time,
            "overall_transfer_time": overall,
            "per_user_throughput": prediction.per_user_throughput,
            "conditional_time_per_bit": prediction.conditional_time_per_bit,
            "mean_active_flows": mean_active_flows(load),
        })
    return pd.DataFrame(rows, columns=PREDICTION_COLUMNS)


def sim_class_rows(stats: SimStats, analytic: Optional[pd.DataFrame] = None) -> pd.DataFrame:
    """Per-class simulation results, with the closed-form values beside them when given."""
    reference = {}
    if analytic is not None:
        reference = {row["label"]: row for row in analytic.to_dict(orient="records")}

    rows = []
    for label in stats.labels:
        measured = stats.per_class[label]
        row = vars(measured).copy()
        model = reference.get(label)
        if model is not None:
            row["analytic_transfer_time"] = model["mean_transfer_time"]
            row["analytic_throughput"] = model["per_user_throughput"]
            row["relative_gap"] = (
                abs(measured.mean_transfer_time - model["mean_transfer_time"])
                / model["mean_transfer_time"]
            )
        rows.append(row)
    return pd.DataFrame(rows, columns=SIM_CLASS_COLUMNS)


def occupancy_rows(stats: SimStats) -> pd.DataFrame:
    fractions = occupancy_histogram(stats)
    return pd.DataFrame({
        "active_flows": np.arange(len(fractions)),
        "time": list(stats.occupancy_time),
        "fraction": fractions,
    })


def _mbps(rate: Optional[float]) -> Optional[float]:
    return None if rate is None else to_mbps(rate)


def verdict_rows(verdicts: Sequence[PlanVerdict], thresholds: Sequence) -> pd.DataFrame:
    """One row per area, plan year and threshold; rates in Mb/s rounded to 0.1."""
    rows = []
    for verdict in verdicts:
        for year in verdict.years:
            for threshold in thresholds:
                row = {
                    "area_id": verdict.area_id,
                    "line": verdict.line,
                    "threshold": threshold.name,
                    "year": year.year,
                    "year_offset": year.offset,
                    "classification": year.classification[threshold.name],
                    "binding_year": verdict.binding_year[threshold.name],
                }
                for d in DIRECTIONS:
                    direction = year.directions[d]
                    row[f"{d}_rho"] = direction.rho
                    row[f"{d}_rate_mbps"] = _mbps(direction.rate)
                    row[f"{d}_floor_mbps"] = _mbps(threshold.floor(d))
                    row[f"{d}_required_mbps"] = _mbps(direction.required_rates[threshold.name])
                    row[f"{d}_nominal_mbps"] = _mbps(verdict.legacy[d]["nominal"])
                    row[f"{d}_contemporaneity_mbps"] = _mbps(
                        verdict.legacy[d]["contemporaneity"]
                    )
                rows.append(row)
    df = pd.DataFrame(rows, columns=VERDICT_COLUMNS)
    for column in ("line", "binding_year"):
        df[column] = df[column].astype("Int64")
    return df


def inference_rows(samples: Sequence[MeasuredSpeed], report: InferenceReport) -> pd.DataFrame:
    rows = []
    for sample, rho in zip(samples, report.per_sample):
        rows.append({
            "line": sample.line,
            "sample_id": sample.sample_id,
            "measured_speed": sample.measured_speed,
            "channel_rate": sample.channel_rate,
            "mcs": sample.mcs_index,
            "rho": rho,
            "consistent": rho is not None,
        })
    df = pd.DataFrame(rows, columns=INFERENCE_COLUMNS)
    for column in ("line", "mcs"):
        df[column] = df[column].astype("Int64")
    return df


def malformed_rows(malformed: Iterable[Tuple[Optional[int], str]]) -> List[Dict[str, Any]]:
    return [{"line": line, "error": message} for line, message in malformed]
