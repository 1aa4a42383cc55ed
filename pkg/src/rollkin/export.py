"""Shared CSV/JSON formatting: fixed schemas, 17 significant digits."""

import json


def format_float(x):
    return format(float(x), ".17g")


def rows_to_csv(header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_float(x) for x in row))
    return "\n".join(lines) + "\n"


MOTION_CSV_HEADER = (
    ["t"]
    + [f"A{i}{j}" for i in range(1, 4) for j in range(1, 4)]
    + ["b1", "b2", "b3", "omega1", "omega2", "omega3", "contact1", "contact2", "contact3"]
)


def motion_rows(ts, rotations, translations, omegas, contacts):
    rows = []
    for k, t in enumerate(ts):
        rows.append(
            [t]
            + list(rotations[k].reshape(-1))
            + list(translations[k])
            + list(omegas[k])
            + list(contacts[k])
        )
    return rows


def motion_family_csv(ts, rotations, translations, omegas, contacts):
    return rows_to_csv(MOTION_CSV_HEADER, motion_rows(ts, rotations, translations, omegas, contacts))


def motion_family_json(ts, rotations, translations, omegas, contacts):
    payload = {
        "t": [float(t) for t in ts],
        "A": [[float(x) for x in R.reshape(-1)] for R in rotations],
        "b": [[float(x) for x in b] for b in translations],
        "omega": [[float(x) for x in w] for w in omegas],
        "contact": [[float(x) for x in c] for c in contacts],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


SPEED_CSV_HEADER = ["u", "v", "r", "theta", "speed_closed", "speed_simulated"]


def speed_rows_csv(rows):
    """Rows of (u, v, r, theta, speed_closed, speed_simulated); nan for missing."""
    return rows_to_csv(SPEED_CSV_HEADER, rows)
