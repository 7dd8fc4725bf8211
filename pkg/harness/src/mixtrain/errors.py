"""Error types raised by the training harness."""

from __future__ import annotations


class ConfigurationError(ValueError):
    """A sweep configuration or model configuration is unusable."""


class DatasetMissing(RuntimeError):
    """The image dataset is not present locally and cannot be fetched."""


class MissingCells(ValueError):
    """A results table does not cover the full budget/ratio/seed grid.

    The uncovered combinations are listed in ``missing``.
    """

    def __init__(self, missing: list[tuple[int, float, int]]) -> None:
        self.missing = sorted(missing)
        preview = ", ".join(f"(B={b}, R={r}, seed={s})" for b, r, s in self.missing[:5])
        more = "" if len(self.missing) <= 5 else f" and {len(self.missing) - 5} more"
        super().__init__(f"results table is missing {len(self.missing)} cells: {preview}{more}")
