"""Per-step KPI stream as CSV, one row per (step, BS).

Column order is fixed: see KPI_COLUMNS.
"""

from __future__ import annotations

import csv
from pathlib import Path

KPI_COLUMNS = (
    "step", "time_s", "bs", "cio_db", "attached_ues", "rbu",
    "throughput_bps", "mean_delay_s", "delivered_packets", "dropped_packets",
    "generated_packets",
)


def kpi_rows(step: int, kpi) -> list[list]:
    rows = []
    for j, members in enumerate(kpi.bs_members):
        delivered = int(kpi.delivered_packets[members].sum())
        delay = float(kpi.delay_sum[members].sum() / delivered) if delivered else float("nan")
        rows.append([
            step, f"{kpi.time:.3f}", j, f"{kpi.cio[j]:.6f}", len(members),
            f"{kpi.per_bs_rbu[j]:.6f}", f"{kpi.per_ue_throughput[members].sum():.3f}",
            f"{delay:.6f}", delivered, int(kpi.dropped_packets[members].sum()),
            int(kpi.generated_packets[members].sum()),
        ])
    return rows


class KpiCsvWriter:
    """Appends KPI rows; writes the header only when creating the file."""

    def __init__(self, path):
        self.path = Path(path)
        self._new = not self.path.exists() or self.path.stat().st_size == 0

    def append(self, step: int, kpi) -> None:
        with self.path.open("a", newline="") as fh:
            w = csv.writer(fh)
            if self._new:
                w.writerow(KPI_COLUMNS)
                self._new = False
            w.writerows(kpi_rows(step, kpi))
