"""
File formats: load-profile CSV in, trajectory / MET / curve CSVs out.

All numeric output uses fixed 6-decimal formatting and a fixed column order so
that repeated runs are byte-identical.
"""

import io
import logging
import math
from typing import Iterable, List, Tuple

import pandas as pd
from pydantic import ValidationError

from fatigue_errors import ProfileParseError
from fatigue_core import FatigueTrajectory, LoadProfile

logger = logging.getLogger(__name__)

PROFILE_COLUMNS = ["duration_min", "load_N"]
MET_COLUMNS = ["model", "f_mvc", "met_min"]
FLOAT_FORMAT = "%.6f"


def parse_load_profile_text(text: str) -> LoadProfile:
    """Parse ``duration_min,load_N`` CSV text; row numbers are file lines.

    Blank lines are skipped but still counted.
    """
    try:
        frame = pd.read_csv(io.StringIO(text), dtype=str, skipinitialspace=True, skip_blank_lines=False)
    except pd.errors.EmptyDataError:
        raise ProfileParseError("missing header 'duration_min,load_N'", row=1) from None
    except pd.errors.ParserError as e:
        raise ProfileParseError(f"malformed CSV: {e}") from None
    if [str(c).strip() for c in frame.columns] != PROFILE_COLUMNS:
        raise ProfileParseError(f"expected header 'duration_min,load_N', got {','.join(map(str, frame.columns))!r}", row=1)

    pairs: List[Tuple[float, float]] = []
    for i, (duration_cell, load_cell) in enumerate(frame.itertuples(index=False, name=None)):
        row = i + 2
        if pd.isna(duration_cell) and pd.isna(load_cell):
            continue
        try:
            duration, load = float(duration_cell), float(load_cell)
        except (TypeError, ValueError):
            raise ProfileParseError(f"non-numeric cell ({duration_cell!r}, {load_cell!r})", row=row) from None
        if not (math.isfinite(duration) and math.isfinite(load)):
            raise ProfileParseError("values must be finite", row=row)
        if duration <= 0:
            raise ProfileParseError("duration must be positive", row=row)
        if load < 0:
            raise ProfileParseError("load must be non-negative", row=row)
        pairs.append((duration, load))

    if not pairs:
        raise ProfileParseError("profile has no segments")
    try:
        return LoadProfile.from_pairs(pairs)
    except ValidationError as e:
        raise ProfileParseError(str(e)) from e


def parse_load_profile(path: str) -> LoadProfile:
    with open(path, "r", encoding="utf-8") as f:
        profile = parse_load_profile_text(f.read())
    logger.info("Parsed %d segments (%.6f min) from %s", len(profile.segments), profile.total_duration, path)
    return profile


def _csv_text(frame: pd.DataFrame) -> str:
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, na_rep="nan", lineterminator="\n")
    return buffer.getvalue()


def trajectory_csv(traj: FatigueTrajectory) -> str:
    return _csv_text(traj.to_frame())


def met_frame(rows: Iterable[Tuple[str, float, float]]) -> pd.DataFrame:
    return pd.DataFrame(list(rows), columns=MET_COLUMNS)


def frame_csv(frame: pd.DataFrame) -> str:
    return _csv_text(frame)


def frame_text(frame: pd.DataFrame) -> str:
    """Aligned text table with 6-decimal floats."""
    return frame.to_string(index=False, float_format=lambda v: f"{v:.6f}", na_rep="nan") + "\n"


def render(frame: pd.DataFrame, output_format: str) -> str:
    return frame_text(frame) if output_format == "text" else frame_csv(frame)


def comparison_csv(frame: pd.DataFrame, max_abs_diff: float, pearson: float) -> str:
    return _csv_text(frame) + f"# max_abs_diff={max_abs_diff:.6f},pearson_r={pearson:.6f}\n"


def write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logger.info("Wrote %s", path)
