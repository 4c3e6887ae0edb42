#!/usr/bin/env python3
"""Generate the twelve sender/wearer fixture scenarios under scenarios/pairs/.

Each wearer spends an hour walking between four stations (A..D) spaced 80 m
apart, wearing the glasses from 09:10 to 09:45. Messages that should arrive
target stations, times or posters the wearer reaches while wearing; messages
that should not target far-away places, posters never approached, or times
when the glasses are off. Re-run after editing PAIRS:

    python3 tools/gen_pair_fixtures.py
"""
import json
import math
import pathlib

# (sent, delivered) per category: location, time, marker, specific, flexible
PAIRS = [
    ((1, 1), (3, 0), (3, 3), (0, 0), (0, 0)),
    ((2, 0), (3, 1), (2, 2), (1, 0), (0, 0)),
    ((1, 1), (1, 1), (1, 0), (1, 0), (0, 0)),
    ((5, 5), (1, 1), (2, 2), (1, 1), (0, 0)),
    ((0, 0), (2, 1), (0, 0), (6, 0), (1, 0)),
    ((3, 1), (5, 0), (1, 1), (0, 0), (8, 5)),
    ((1, 0), (0, 0), (7, 1), (8, 0), (2, 1)),
    ((1, 1), (1, 1), (1, 1), (1, 0), (6, 6)),
    ((6, 3), (1, 0), (4, 2), (0, 0), (2, 1)),
    ((4, 3), (2, 0), (2, 2), (0, 0), (0, 0)),
    ((1, 1), (1, 0), (1, 1), (0, 0), (4, 4)),
    ((2, 2), (1, 1), (5, 5), (1, 0), (0, 0)),
]

M_PER_DEG_LAT = 111_195.0  # 6 371 000 m sphere


def offset(base, north_m, east_m):
    lat, lon = base
    return (lat + north_m / M_PER_DEG_LAT,
            lon + east_m / (M_PER_DEG_LAT * math.cos(math.radians(lat))))


def ts(day, hh, mm, ss=0):
    return f"2021-06-{day:02d}T{hh:02d}:{mm:02d}:{ss:02d}Z"


def pt(p):
    return {"lat": round(p[0], 7), "lon": round(p[1], 7)}


def build(index, counts):
    pair = index + 1
    day = pair
    sender, wearer = f"S{pair}", f"W{pair}"
    home = (47.6062 + 0.01 * index, -122.3321)
    st = {name: offset(home, 0, 80 * (k + 1)) for k, name in enumerate("ABCD")}
    far = {"F": offset(home, 500, 0), "E": offset(home, -600, 200)}

    markers = [
        ("poster_1", st["B"]), ("poster_2", st["C"]), ("poster_3", st["A"]),
        ("poster_4", st["D"]), ("poster_5", offset(home, 900, 0)),
        ("poster_6", offset(home, -900, 0)), ("poster_7", offset(home, 0, -900)),
        ("poster_8", offset(home, 400, 400)),
    ]

    # Arrive at each station on the minute; walking legs take one minute.
    waypoints = [
        (ts(day, 9, 0), home), (ts(day, 9, 15), home),
        (ts(day, 9, 16), st["A"]), (ts(day, 9, 22), st["A"]),
        (ts(day, 9, 23), st["B"]), (ts(day, 9, 30), st["B"]),
        (ts(day, 9, 31), st["C"]), (ts(day, 9, 45), st["C"]),
        (ts(day, 9, 46), st["D"]), (ts(day, 10, 0), st["D"]),
    ]

    def fence(p, r=10):
        return {"center": pt(p), "radius": r}

    def window(a, b):
        return {"start": ts(day, *a), "end": ts(day, *b)}

    def marker(m):
        return {"marker_id": m}

    hit = {
        "location": [{"geofence": fence(st["A"])}, {"geofence": fence(st["B"], 7)},
                     {"geofence": fence(st["C"], 14)}],
        "time": [{"window": window((9, 20), (9, 25))}, {"window": window((9, 33), (9, 40))},
                 {"window": window((9, 12), (9, 14))}],
        "marker": [{"marker": marker("poster_1")}, {"marker": marker("poster_2")},
                   {"marker": marker("poster_3")}],
        "specific": [
            {"geofence": fence(st["A"]), "window": window((9, 16), (9, 22))},
            {"geofence": fence(st["B"]), "marker": marker("poster_1")},
            {"geofence": fence(st["C"]), "marker": marker("poster_2"), "window": window((9, 35), (9, 40))},
        ],
        "flexible": [
            {"geofence": fence(far["F"]), "window": window((9, 20), (9, 25))},
            {"marker": marker("poster_5"), "geofence": fence(st["B"])},
            {"geofence": fence(st["D"]), "marker": marker("poster_2")},
        ],
    }
    miss = {
        "location": [{"geofence": fence(far["F"])}, {"geofence": fence(st["D"])},
                     {"geofence": fence(far["E"], 14)}],
        "time": [{"window": window((9, 50), (9, 58))}, {"window": window((9, 46), (9, 49))},
                 {"window": window((9, 2), (9, 8))}],
        "marker": [{"marker": marker("poster_4")}, {"marker": marker("poster_6")},
                   {"marker": marker("poster_7")}],
        "specific": [
            {"geofence": fence(st["A"]), "window": window((9, 40), (9, 44))},
            {"geofence": fence(st["B"]), "marker": marker("poster_2")},
            {"geofence": fence(far["F"]), "window": window((9, 20), (9, 25))},
            {"geofence": fence(st["C"]), "marker": marker("poster_4"), "window": window((9, 31), (9, 45))},
        ],
        "flexible": [
            {"geofence": fence(far["F"]), "window": window((9, 50), (9, 58))},
            {"marker": marker("poster_6"), "geofence": fence(st["D"])},
            {"geofence": fence(far["E"]), "marker": marker("poster_4")},
        ],
    }
    contents = ["dog", "tree", "bee", "pizza", "basketball", "ball", "butterfly",
                "balloon", "cake", "flower", "bird", "avatar_wave", "avatar_hello"]

    script = []
    responses = []
    seq = 0
    declined = False

    def add(kind, schedule, outcome):
        nonlocal seq, declined
        ref = f"{kind}-{outcome}-{seq}"
        entry = {
            "at": ts(day, 9, (5 * seq) // 60, (5 * seq) % 60),
            "ref": ref,
            "sender": sender,
            "recipient": wearer,
            "content_id": contents[seq % len(contents)],
            "scale": [1.0, 0.5, 2.0][seq % 3],
            "voice_note": {"duration": 2.0 + (seq % 8), "transcript": f"{kind} note {seq} from {sender}"},
        }
        if schedule is not None:
            schedule = dict(schedule)
            schedule["specificity"] = "Flexible" if kind == "flexible" else "Specific"
            entry["schedule"] = schedule
        script.append(entry)
        if outcome == "hit" and not declined and kind != "direct":
            declined = True
            responses.append({"ref": ref, "answer": "No",
                              "utterances": [{"offset": 3.0, "transcript": f"SENTINEL-{wearer}-DECLINED"}]})
        seq += 1

    add("direct", None, "hit")
    for kind, (sent, delivered) in zip(["location", "time", "marker", "specific", "flexible"], counts):
        for k in range(delivered):
            add(kind, hit[kind][k % len(hit[kind])], "hit")
        for k in range(sent - delivered):
            add(kind, miss[kind][k % len(miss[kind])], "miss")

    return {
        "schema": "wandrelay.scenario/1",
        "name": f"pair{pair:02d}",
        "seed": 1000 + pair,
        "tick": 1,
        "end": ts(day, 10, 0),
        "markers": [{"marker_id": m, "position": pt(p)} for m, p in markers],
        "recipients": [{
            "principal": wearer,
            "wear_sessions": [{"start": ts(day, 9, 10), "end": ts(day, 9, 45)}],
            "trajectory": [{"t": t, **pt(p)} for t, p in waypoints],
        }],
        "sender_script": script,
        "consent_policy": {
            "default": "Yes",
            "default_utterances": [{"offset": 2.0, "transcript": "that is so cool"}],
            "responses": responses,
        },
    }


def main():
    out = pathlib.Path(__file__).resolve().parent.parent / "scenarios" / "pairs"
    out.mkdir(parents=True, exist_ok=True)
    for i, counts in enumerate(PAIRS):
        path = out / f"pair{i + 1:02d}.json"
        path.write_text(json.dumps(build(i, counts), indent=2) + "\n")
        print(path)


if __name__ == "__main__":
    main()
