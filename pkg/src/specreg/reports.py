"""JSON and CSV report writers shared by the command-line front end."""

import csv
import json

SCHEMA_VERSION = 1


def write_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def path_report(steps, errors, times, extra=None):
    report = {
        "schema_version": SCHEMA_VERSION,
        "path": [
            {"t": int(t), "validation_error": float(e), "cumulative_time": float(c)}
            for t, e, c in zip(steps, errors, times)
        ],
    }
    if extra:
        report.update(extra)
    return report


def surface_csv_rows(surface):
    rows = []
    for i, lam in enumerate(surface.lambda_grid):
        for j, m in enumerate(surface.m_grid):
            rows.append([float(lam), int(m), float(surface.errors[i, j])])
    return rows


def bench_report(entries, extra=None):
    report = {"schema_version": SCHEMA_VERSION, "bench": entries}
    if extra:
        report.update(extra)
    return report
