"""Deterministic synthetic datasets with seeded quality defects.

Each generator writes a CSV file and returns a manifest of exactly what was
seeded (per column, per defect kind), so tests can assert engine output
against known-by-construction ground truth. Row selection uses a seeded
``random.Random``; identical arguments always produce identical bytes.
"""

from __future__ import annotations

import csv
import random
from datetime import date, timedelta
from pathlib import Path

REGISTER_HEADER = [
    "reg_number", "name", "name_before_quotes", "name_in_quotes",
    "name_after_quotes", "type", "type_text", "reg_type", "reg_type_text",
    "registered", "terminated", "closed", "address", "address_id",
    "region_code", "city_code", "post_code", "atv_code", "municipality",
    "street", "house_number", "office",
]

_COMPANY_TYPES = [
    "SIA", "AS", "IK", "ZS", "KS", "PS", "ASF", "KOR", "PRO", "SAA", "SPA", "SPO",
]
_TYPE_TEXT = {
    "SIA": "Sabiedrība ar ierobežotu atbildību",
    "AS": "Akciju sabiedrība",
    "IK": "Individuālais komersants",
    "ZS": "Zemnieku saimniecība",
    "KS": "Kooperatīvā sabiedrība",
    "PS": "Pilnsabiedrība",
    "ASF": "Ārvalsts filiāle",
    "KOR": "Korporācija",
    "PRO": "Profesionālā organizācija",
    "SAA": "Sabiedriskā apvienība",
    "SPA": "Sporta apvienība",
    "SPO": "Sporta organizācija",
}


def _date_pool(start: date, days: int, fmt: str) -> list[str]:
    pool = []
    for k in range(days):
        d = start + timedelta(days=k)
        if fmt == "DD.MM.YYYY":
            pool.append(f"{d.day:02d}.{d.month:02d}.{d.year:04d}")
        elif fmt == "MM/DD/YYYY":
            pool.append(f"{d.month:02d}/{d.day:02d}/{d.year:04d}")
        elif fmt == "MM.DD.YYYY":
            pool.append(f"{d.month:02d}.{d.day:02d}.{d.year:04d}")
        else:
            raise ValueError(fmt)
    return pool


def _write(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_company_register(path: str | Path, rows: int = 396_952, seed: int = 2018):
    """Large company-register-like dataset: 22 columns, defects seeded as
    null values, short postal codes and short territorial codes."""
    rng = random.Random(seed)
    n = rows

    def pick(k: int) -> frozenset[int]:
        return frozenset(rng.sample(range(n), k))

    name_null = pick(10)
    type_text_null = pick(1403)
    address_id_null = rng.sample(range(n), 4523)
    address_null = frozenset(address_id_null[:366])  # subset: both fields blank
    address_id_null = frozenset(address_id_null)
    region_null = pick(280_662)
    city_null = pick(99_049)
    post_pick = rng.sample(range(n), 20_496 + 2)
    post_null = frozenset(post_pick[:20_496])
    post_bad = frozenset(post_pick[20_496:])
    atv_pick = rng.sample(range(n), 4574 + 947)
    atv_null = frozenset(atv_pick[:4574])
    atv_bad = frozenset(atv_pick[4574:])

    reg_dates = _date_pool(date(1991, 5, 4), 9000, "DD.MM.YYYY")
    term_dates = _date_pool(date(2005, 1, 1), 4000, "DD.MM.YYYY")
    ntypes = len(_COMPANY_TYPES)

    def gen():
        for i in range(n):
            ctype = _COMPANY_TYPES[i % ntypes]
            closed_here = i % 97 == 0
            yield [
                str(40_003_000_000 + i),
                "" if i in name_null else f"{ctype} Piemērs {i}",
                ctype if i % 3 == 0 else "",
                f'"Piemērs {i}"',
                "",
                ctype,
                "" if i in type_text_null else _TYPE_TEXT[ctype],
                "K" if i % 2 == 0 else "F",
                "Komersants" if i % 2 == 0 else "Filiāle",
                reg_dates[i % 9000],
                term_dates[i % 4000] if closed_here else "",
                "likvidēts" if closed_here else "",
                "" if i in address_null else f"Brīvības iela {i % 300 + 1}, Rīga",
                "" if i in address_id_null else str(100_000_000 + i),
                "" if i in region_null else str(250_000_000 + i % 119),
                "" if i in city_null else str(100_000_000 + (i % 500) * 7),
                ""
                if i in post_null
                else ("123" if i in post_bad else str(1000 + i % 9000)),
                ""
                if i in atv_null
                else ("12345" if i in atv_bad else str(1_000_000 + i % 900_000)),
                f"Novads {i % 110}",
                f"iela {i % 300}",
                str(i % 200 + 1),
                str(i % 12 + 1) if i % 5 == 0 else "",
            ]

    _write(Path(path), REGISTER_HEADER, gen())
    return {
        "rows": n,
        "defects": {
            "name": {"not_null": 10},
            "type_text": {"not_null": 1403},
            "address": {"not_null": 366},
            "address_id": {"not_null": 4523},
            "region_code": {"not_null": 280_662},
            "city_code": {"not_null": 99_049},
            "post_code": {"not_null": 20_496, "four_digits": 2},
            "atv_code": {"not_null": 4574, "seven_digits": 947},
        },
        # address nulls are a subset of address_id nulls, so the pairing
        # rule fires exactly on the rows where only address_id is blank.
        "pairing_violations": 4523 - 366,
    }


INFOSYSTEM_HEADER = [
    "is_number", "is_name", "personal_data", "financial_data", "service_rate",
    "website", "resp_person_number", "resp_person_name", "phone", "email",
    "manager_code", "holder_code", "holder_name", "status", "closing_date",
    "carrier_name", "carrier_code", "higher_authority", "authority_code",
    "protocol", "users_count", "maintainer", "maintainer_code", "os_platform",
    "db_platform", "launch_date", "audit_date", "data_volume",
    "classification", "security_level", "contact_address", "contact_city",
    "backup_policy", "retention_period", "interface_count", "notes",
]

WEBSITE_PLACEHOLDERS = ("http://-", "http://", "http://Nav", "http://Nav%")


def write_infosystem_catalog(path: str | Path, rows: int = 245, seed: int = 36):
    """Catalogue of government information systems: 36 columns with defects
    seeded in exactly 25 of them; the website column carries four distinct
    absence-marker values alongside truly invalid addresses and NULLs."""
    rng = random.Random(seed)
    n = rows
    order = list(range(n))
    rng.shuffle(order)

    manifest_defects: dict[str, dict[str, int]] = {}

    # Defect partitions within one column come from a single fresh shuffle,
    # so the seeded kinds never overlap on a row.
    def fresh(column_kinds: list[tuple[str, str, int]]) -> list[frozenset[int]]:
        local = list(range(n))
        rng.shuffle(local)
        out = []
        cursor = 0
        for column, kind, k in column_kinds:
            manifest_defects.setdefault(column, {})[kind] = k
            out.append(frozenset(local[cursor : cursor + k]))
            cursor += k
        return out

    personal_null = fresh([("personal_data", "not_null", 1)])[0]
    financial_null = fresh([("financial_data", "not_null", 1)])[0]
    sr_null, sr_dash, sr_nav = fresh(
        [
            ("service_rate", "not_null", 1),
            ("service_rate", "placeholder_dash", 45),
            ("service_rate", "placeholder_nav", 34),
        ]
    )
    web_bad, web_ph1, web_ph2, web_ph3, web_ph4, web_null = fresh(
        [
            ("website", "url_format", 49),
            ("website", "placeholder_dash", 22),
            ("website", "placeholder_bare", 2),
            ("website", "placeholder_nav", 1),
            ("website", "placeholder_nav_pct", 3),
            ("website", "null", 58),
        ]
    )
    phone_bad = fresh([("phone", "phone_format", 2)])[0]
    email_bad = fresh([("email", "lv_address", 3)])[0]
    mgr_null, mgr_bad = fresh(
        [("manager_code", "not_null", 2), ("manager_code", "eleven_digits", 2)]
    )
    holder_null, holder_dash, holder_bad = fresh(
        [
            ("holder_code", "not_null", 2),
            ("holder_code", "placeholder_dash", 2),
            ("holder_code", "eleven_digits", 10),
        ]
    )
    hname_dash = fresh([("holder_name", "placeholder_dash", 5)])[0]

    closed_rows = frozenset(order[:57])
    bad_sep_dates = frozenset(order[:27])  # closed rows with MM.DD.YYYY
    manifest_defects["closing_date"] = {"wrong_separator_warning": 27}

    carrier_null = fresh([("carrier_name", "not_null", 2)])[0]
    carrier_bad = fresh([("carrier_code", "eleven_digits", 3)])[0]
    higher_null = fresh([("higher_authority", "not_null", 1)])[0]
    auth_bad = fresh([("authority_code", "eleven_digits", 2)])[0]
    proto_bad = fresh([("protocol", "allowed_values", 4)])[0]
    users_bad = fresh([("users_count", "type", 2)])[0]
    maint_null = fresh([("maintainer", "not_null", 1)])[0]
    maintc_bad = fresh([("maintainer_code", "eleven_digits", 2)])[0]
    os_null = fresh([("os_platform", "not_null", 1)])[0]
    db_null = fresh([("db_platform", "not_null", 1)])[0]
    launch_bad = fresh([("launch_date", "type", 2)])[0]
    audit_null = fresh([("audit_date", "not_null", 2)])[0]
    volume_bad = fresh([("data_volume", "type", 1)])[0]
    class_bad = fresh([("classification", "allowed_values", 3)])[0]
    sec_bad = fresh([("security_level", "allowed_values", 2)])[0]
    caddr_null = fresh([("contact_address", "not_null", 1)])[0]

    ok_dates = _date_pool(date(2012, 1, 1), 2500, "MM/DD/YYYY")
    bad_dates = _date_pool(date(2012, 1, 1), 2500, "MM.DD.YYYY")
    protocols = ["https", "http", "ftp"]
    classes = ["valsts nozīmes", "pašvaldības", "iestādes"]
    levels = ["augsts", "vidējs", "zems"]
    rates = ["augsts", "vidējs", "zems"]

    def website(i: int) -> str:
        if i in web_null:
            return ""
        if i in web_bad:
            return f"www.bez-protokola-{i}.com"
        if i in web_ph1:
            return "http://-"
        if i in web_ph2:
            return "http://"
        if i in web_ph3:
            return "http://Nav"
        if i in web_ph4:
            return "http://Nav%"
        return f"http://www.sistema{i}.lv"

    def phone(i: int) -> str:
        if i in phone_bad:
            return "12345678"
        return f"6{3000000 + i:07d}" if i % 2 == 0 else f"371{20000000 + i:08d}"

    def gen():
        for i in range(n):
            closed = i in closed_rows
            if not closed:
                closing = ""
            elif i in bad_sep_dates:
                closing = bad_dates[i % 2500]
            else:
                closing = ok_dates[i % 2500]
            yield [
                str(i + 1),
                f"Valsts IS {i + 1}",
                "" if i in personal_null else ("satur" if i % 2 else "nesatur"),
                "" if i in financial_null else ("satur" if i % 3 else "nesatur"),
                ""
                if i in sr_null
                else ("-" if i in sr_dash else ("nav" if i in sr_nav else rates[i % 3])),
                website(i),
                str(1000 + i),
                f"Atbildīgā persona {i + 1}",
                phone(i),
                "wrong-address" if i in email_bad else f"persona{i}@iestade.lv",
                ""
                if i in mgr_null
                else ("12345" if i in mgr_bad else str(10_000_000_000 + i)),
                ""
                if i in holder_null
                else (
                    "-"
                    if i in holder_dash
                    else ("9876" if i in holder_bad else str(20_000_000_000 + i))
                ),
                "-" if i in hname_dash else f"Turētājs {i + 1}",
                "slēgta" if closed else "aktīva",
                closing,
                "" if i in carrier_null else f"Nesējs {i % 9}",
                "777" if i in carrier_bad else str(30_000_000_000 + i),
                "" if i in higher_null else f"Ministrija {i % 11}",
                "55" if i in auth_bad else str(40_000_000_000 + i),
                "telnet" if i in proto_bad else protocols[i % 3],
                "daudz" if i in users_bad else str(10 + i * 3),
                "" if i in maint_null else f"Uzturētājs {i % 7}",
                "1" if i in maintc_bad else str(50_000_000_000 + i),
                "" if i in os_null else ("Linux" if i % 2 else "Windows"),
                "" if i in db_null else ("PostgreSQL" if i % 2 else "MSSQL"),
                bad_dates[(i + 7) % 2500] if i in launch_bad else ok_dates[(i + 7) % 2500],
                "" if i in audit_null else ok_dates[(i + 31) % 2500],
                "n/a" if i in volume_bad else f"{(i % 900) + 1}.5",
                "cits veids" if i in class_bad else classes[i % 3],
                "kritisks" if i in sec_bad else levels[i % 3],
                "" if i in caddr_null else f"Pils iela {i % 40 + 1}",
                "Rīga",
                "katru dienu" if i % 2 else "reizi nedēļā",
                str(5 + i % 10),
                str(i % 6),
                f"piezīme {i}",
            ]

    _write(Path(path), INFOSYSTEM_HEADER, gen())
    affected = sorted(
        c for c, kinds in manifest_defects.items()
        if any(k != "null" and not k.endswith("warning") for k in kinds)
        and c != "closing_date"
    )
    return {
        "rows": n,
        "defects": manifest_defects,
        "affected_columns": affected,
        "website_placeholders": {
            "http://-": 22,
            "http://": 2,
            "http://Nav": 1,
            "http://Nav%": 3,
        },
    }


CHANNEL_HEADER = [
    "record_id", "direction", "channel", "topicgroup", "topic",
    "client_type", "record_date", "count",
]

VALID_CHANNELS = ["e-pasts", "portāls", "tikšanās"]
EXTRA_CHANNELS = ["telefons", "īsziņa", "cits", "fakss", "vēstule", "klātiene"]


def write_channel_stats(path: str | Path, rows: int = 39_490, seed: int = 8):
    """Communication statistics: a channel column with six undocumented
    values (25.9 percent of records) and a topic-group column with eight
    rare values (4 singletons, 3 pairs, 1 triple)."""
    rng = random.Random(seed)
    n = rows
    extra_rows = rng.sample(range(n), 10_228)
    extra_channel = {r: EXTRA_CHANNELS[j % 6] for j, r in enumerate(extra_rows)}

    remaining = sorted(set(range(n)) - set(extra_rows))
    rare_pool = rng.sample(range(n), 13)
    rare_topic: dict[int, str] = {}
    names = [f"Rets jautājums {k + 1}" for k in range(8)]
    sizes = [1, 1, 1, 1, 2, 2, 2, 3]
    cursor = 0
    for name, size in zip(names, sizes):
        for r in rare_pool[cursor : cursor + size]:
            rare_topic[r] = name
        cursor += size

    dates = _date_pool(date(2016, 1, 1), 900, "DD.MM.YYYY")

    def gen():
        for i in range(n):
            channel = extra_channel.get(i, VALID_CHANNELS[i % 3])
            topicgroup = rare_topic.get(i, f"Grupa {i % 18 + 1:02d}")
            yield [
                str(i + 1),
                "ienākošā" if i % 2 else "izejošā",
                channel,
                topicgroup,
                f"Temats {i % 40 + 1}",
                "privātpersona" if i % 3 else "juridiska persona",
                dates[i % 900],
                str(1 + i % 5),
            ]

    _write(Path(path), CHANNEL_HEADER, gen())
    return {
        "rows": n,
        "invalid_channel_rows": 10_228,
        "channel_values": len(VALID_CHANNELS) + len(EXTRA_CHANNELS),
        "rare_topicgroups": dict(zip(names, sizes)),
        "rare_records": 13,
        "topicgroup_distinct": 26,
    }


LICENCE_HEADER = [
    "requester", "reg_number", "program", "program_type", "place",
    "hours", "decision", "terms", "licence_number",
]


def write_licence_list(path: str | Path, rows: int = 400, seed: int = 9):
    """Educational-licence list: clean except for a mostly-empty hours
    column (89 percent NULL)."""
    rng = random.Random(seed)
    n = rows
    hours_null = frozenset(rng.sample(range(n), round(n * 0.89)))
    types = ["pirmsskolas", "interešu", "profesionālās ievirzes", "pieaugušo"]

    def gen():
        for i in range(n):
            yield [
                f"Iestāde {i + 1}",
                str(40_008_000_000 + i),
                f"Programma {i % 30 + 1}",
                types[i % 4],
                f"Rīga, skolas iela {i % 50 + 1}",
                "" if i in hours_null else str(20 + i % 380),
                f"Lēmums Nr. {i + 1}",
                "01.09.2013 - 31.08.2016",
                f"DIKS-{i + 1:05d}",
            ]

    _write(Path(path), LICENCE_HEADER, gen())
    return {"rows": n, "hours_nulls": round(n * 0.89)}


def write_closure_cases(
    path: str | Path, rows: int = 1000, inconsistent: int = 7, seed: int = 7
):
    """Termination-consistency fixture: exactly ``inconsistent`` rows carry a
    termination date without a closure marker; the rest are consistent."""
    rng = random.Random(seed)
    n = rows
    picked = rng.sample(range(n), inconsistent + 500)
    bad = frozenset(picked[:inconsistent])
    both = frozenset(picked[inconsistent:])
    dates = _date_pool(date(2010, 1, 1), 3500, "DD.MM.YYYY")

    def gen():
        for i in range(n):
            terminated = dates[i % 3500] if (i in bad or i in both) else ""
            closed = "likvidēts" if i in both else ""
            yield [f"Uzņēmums {i + 1}", terminated, closed]

    _write(Path(path), ["company", "terminated", "closed"], gen())
    return {"rows": n, "inconsistent": inconsistent}


def write_null_rate_grid(
    path: str | Path,
    rows: int = 1000,
    rates=(0.0, 0.4, 2.9, 3.0, 89.0),
    seed: int = 3,
):
    """One column per requested null rate, exact by construction."""
    rng = random.Random(seed)
    n = rows
    names = [f"col_{str(r).replace('.', '_')}" for r in rates]
    null_sets = []
    for r in rates:
        k = round(n * r / 100)
        null_sets.append(frozenset(rng.sample(range(n), k)))

    def gen():
        for i in range(n):
            yield [
                "" if i in nulls else f"v{i}" for nulls in null_sets
            ]

    _write(Path(path), names, gen())
    return {"rows": n, "null_counts": {nm: len(s) for nm, s in zip(names, null_sets)}}
