from pathlib import Path

import pandas as pd


def records(frame: pd.DataFrame) -> list[dict]:
    """
    Rows as JSON-safe dicts; NaN becomes None.
    """
    return frame.astype(object).where(frame.notna(), None).to_dict(orient="records")


def write_table(frame: pd.DataFrame, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.10g")
    return path
