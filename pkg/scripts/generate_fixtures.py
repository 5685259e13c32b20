#!/usr/bin/env python3
"""Regenerate the frozen test fixtures under tests/fixtures/.

Everything is seeded, so rerunning this script reproduces the committed files
byte for byte. The fixture embedding files place each concept family around
its own base direction; the script asserts the margins the tests rely on
(within-column robustness above cross-column similarity) before writing.
"""

import csv
import json
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
DIM = 32


def unit(v):
    return v / np.linalg.norm(v)


def write_json(path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, ensure_ascii=False, sort_keys=True) + "\n",
                    encoding="utf-8")


def write_csv(path, header, columns):
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = zip(*columns)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def schema_doc(name, tables):
    return {
        "schema": {
            "name": name,
            "tables": [
                {
                    "name": tname,
                    "comment": comment,
                    "attributes": [{"name": a, "comment": c} for a, c in attrs],
                }
                for tname, comment, attrs in tables
            ],
        }
    }


# --- self-match fixture (hash provider) --------------------------------------


def make_selfmatch():
    base = ROOT / "selfmatch"
    tables = [
        ("country", "sovereign states", [
            ("country_name", "official short name"),
            ("capital", "seat of government"),
            ("population", "inhabitants, latest census"),
        ]),
        ("city", "municipalities", [
            ("city_label", "city designation"),
            ("mayor", "head of the city government"),
            ("founded_year", "year of foundation"),
        ]),
        ("river", "streams and rivers", [
            ("river_title", "river designation"),
            ("mouth", "body of water the river ends in"),
            ("length_km", "total length in kilometres"),
        ]),
    ]
    write_json(base / "left.json", schema_doc("geo_left", tables))
    write_json(base / "right.json", schema_doc("geo_right", tables))

    write_csv(base / "country.csv", ["country_name", "capital", "population"], [
        ["France", "Peru", "Japan", "Kenya", "Norway", "Chile"],
        ["Paris", "Lima", "Tokyo", "Nairobi", "Oslo", "Santiago"],
        ["68000000", "34000000", "125000000", "54000000", "5500000", "19500000"],
    ])
    write_csv(base / "city.csv", ["city_label", "mayor", "founded_year"], [
        ["Lyon", "Arequipa", "Osaka", "Mombasa", "Bergen", "Valparaiso"],
        ["Gregory Doucet", "Victor Hugo Rivera", "Hideyuki Yokoyama",
         "Abdulswamad Nassir", "Marit Warncke", "Camila Nieto"],
        ["-43", "1540", "1889", "900", "1070", "1536"],
    ])
    write_csv(base / "river.csv", ["river_title", "mouth", "length_km"], [
        ["Rhone", "Amazon", "Shinano", "Tana", "Glomma", "Loa"],
        ["Gulf of Lion", "Atlantic Ocean", "Sea of Japan", "Indian Ocean",
         "Skagerrak", "Pacific Ocean"],
        ["813", "6400", "367", "1000", "621", "440"],
    ])

    attribute_pairs = []
    for tname, _, attrs in tables:
        for aname, _ in attrs:
            attribute_pairs.append([[tname, aname], [tname, aname]])
    write_json(base / "gold.json", {
        "table_pairs": [[t, t] for t, _, _ in tables],
        "attribute_pairs": attribute_pairs,
    })


# --- movie fixture (fixture provider, robustness margins) --------------------

MOVIE_FAMILIES = {
    "films": {
        "title": ["Midnight Harbor", "The Last Orchard", "Paper Lanterns", "Glass River",
                  "Autumn Conspiracy", "The Silent Cartographer", "Ember and Ash",
                  "Northern Lights Hotel", "The Violet Hour", "Crossing Meridian",
                  "Salt and Stone", "A Quiet Apportionment", "The Ivory Comet",
                  "Gardens of Rust", "Cobalt Avenue", "The Seventh Tide",
                  "Winter Apiary", "The Marble Orchestra", "Driftwood Letters",
                  "Halcyon Days"],
        "genre": ["Drama", "Comedy", "Thriller", "Documentary", "Romance",
                  "Science Fiction", "Western", "Animation"],
        "country_of_origin": ["United States", "France", "Japan", "Brazil", "Italy",
                              "South Korea", "Canada", "Germany", "Spain", "India"],
        "lead_actor": ["Mara Ellison", "Tomas Reyes", "Yuki Amano", "Petra Lindqvist",
                       "Omar Haddad", "Ingrid Bakke", "Carlos Mendez", "Aiko Tanaka",
                       "Lucille Fontaine", "Derek Osei", "Sofia Petrova", "Liam Gallagher",
                       "Nadia Rahal", "Henrik Sund", "Paloma Vidal", "Kenji Mori"],
    },
    "movies": {
        "movie_title": ["Harbor at Midnight", "Orchard's End", "Lantern Festival",
                        "River of Glass", "Conspiracy in Autumn", "Cartographer's Silence",
                        "Ashes and Embers", "Hotel Aurora", "Hour of Violets",
                        "Meridian Crossing", "Stone and Salt", "The Apportionment",
                        "Comet of Ivory", "Rust Gardens", "Avenue Cobalt",
                        "Tide Number Seven", "Apiary in Winter", "Orchestra of Marble",
                        "Letters in Driftwood", "Days of Halcyon"],
        "movie_genre": ["Dramatic Feature", "Comedic Feature", "Suspense", "Documentary Film",
                        "Romantic Feature", "Speculative Fiction", "Frontier Film",
                        "Animated Feature"],
        "origin_country": ["USA", "French Republic", "Nippon", "Brasil", "Italia",
                           "Republic of Korea", "Canadian Provinces", "Deutschland",
                           "Espana", "Bharat"],
        "star": ["M. Ellison", "T. Reyes", "Y. Amano", "P. Lindqvist", "O. Haddad",
                 "I. Bakke", "C. Mendez", "A. Tanaka", "L. Fontaine", "D. Osei",
                 "S. Petrova", "L. Gallagher", "N. Rahal", "H. Sund", "P. Vidal",
                 "K. Mori"],
    },
}

# noise scale per attribute family; small-cardinality families need tighter noise
MOVIE_NOISE = {
    "title": 0.22, "movie_title": 0.22,
    "genre": 0.18, "movie_genre": 0.18,
    "country_of_origin": 0.20, "origin_country": 0.20,
    "lead_actor": 0.20, "star": 0.20,
}

# how far each table's variant of a concept sits from the shared base; keeps
# cross-table same-concept columns clearly below within-column robustness
SIDE_SPREAD = 0.18

# concept base shared by the left/right variant of the same attribute
MOVIE_CONCEPT = {
    "title": "title", "movie_title": "title",
    "genre": "genre", "movie_genre": "genre",
    "country_of_origin": "country", "origin_country": "country",
    "lead_actor": "actor", "star": "actor",
}


def make_movies():
    base = ROOT / "movies"
    rng = np.random.default_rng(20240809)
    concept_bases = {c: unit(rng.normal(size=DIM)) for c in ("title", "genre", "country", "actor")}

    entries = {}
    vectors_by_attr = {}
    for table, families in MOVIE_FAMILIES.items():
        for attr, values in families.items():
            side_base = unit(concept_bases[MOVIE_CONCEPT[attr]] + SIDE_SPREAD * rng.normal(size=DIM))
            noise = MOVIE_NOISE[attr]
            vecs = []
            for value in values:
                vec = unit(side_base + noise * rng.normal(size=DIM))
                entries[value.lower()] = [float(x) for x in vec]
                vecs.append(vec)
            vectors_by_attr[(table, attr)] = np.array(vecs)

    # label vectors so name-based matching works on the same fixture
    label_concepts = {
        "films": "film table", "movies": "film table",
        "title": "title label", "movie title": "title label",
        "genre": "genre label", "movie genre": "genre label",
        "country of origin": "country label", "origin country": "country label",
        "lead actor": "actor label", "star": "actor label",
    }
    label_bases = {}
    for label, concept in label_concepts.items():
        if concept not in label_bases:
            label_bases[concept] = unit(rng.normal(size=DIM))
        entries[label] = [float(x) for x in unit(label_bases[concept] + 0.18 * rng.normal(size=DIM))]

    # verify the margins the robustness criterion needs: within-column halves
    # must be closer than ANY cross-column pair of full representations, the
    # same-concept column of the other table included
    means = {key: unit(v.mean(axis=0)) for key, v in vectors_by_attr.items()}
    for key, vecs in vectors_by_attr.items():
        half = len(vecs) // 2
        self_sim = float(np.dot(unit(vecs[:half].mean(axis=0)), unit(vecs[half:].mean(axis=0))))
        cross = max(
            float(np.dot(means[key], means[other])) for other in means if other != key
        )
        assert self_sim > cross + 0.05, f"margin too thin for {key}: {self_sim} vs {cross}"

    write_json(base / "vectors.json", {"dimension": DIM, "entries": entries})

    def column(table, attr, repeat):
        values = list(MOVIE_FAMILIES[table][attr])
        # duplicate a few head values so distinct/most-common sampling matters
        return (values * repeat)[: len(values) * repeat]

    rows = max(len(v) for v in MOVIE_FAMILIES["films"].values()) * 2
    columns_left, columns_right = [], []
    for attr, values in MOVIE_FAMILIES["films"].items():
        repeated = (values * ((rows // len(values)) + 1))[:rows]
        columns_left.append(repeated)
    for attr, values in MOVIE_FAMILIES["movies"].items():
        repeated = (values * ((rows // len(values)) + 1))[:rows]
        columns_right.append(repeated)

    write_json(base / "left.json", schema_doc("imdb_like", [
        ("films", "feature films", [
            ("title", "original release title"),
            ("genre", "primary genre"),
            ("country_of_origin", "production country"),
            ("lead_actor", "top-billed performer"),
        ]),
    ]))
    write_json(base / "right.json", schema_doc("rt_like", [
        ("movies", "reviewed movies", [
            ("movie_title", "title as reviewed"),
            ("movie_genre", "genre shelf"),
            ("origin_country", "country of production"),
            ("star", "leading performer"),
        ]),
    ]))
    write_csv(base / "films.csv",
              list(MOVIE_FAMILIES["films"].keys()), columns_left)
    write_csv(base / "movies.csv",
              list(MOVIE_FAMILIES["movies"].keys()), columns_right)
    write_json(base / "gold.json", {
        "table_pairs": [["films", "movies"]],
        "attribute_pairs": [
            [["films", "title"], ["movies", "movie_title"]],
            [["films", "genre"], ["movies", "movie_genre"]],
            [["films", "country_of_origin"], ["movies", "origin_country"]],
            [["films", "lead_actor"], ["movies", "star"]],
        ],
    })


# --- bilingual fixture (fixture provider, graded similarities) ---------------

BILINGUAL_VALUES = {
    "country_name": (
        ["France", "Spain", "Peru", "Japan", "Kenya", "Chile", "Norway", "Egypt"],
        ["Frankreich", "Spanien", "Peru", "Japan", "Kenia", "Chile", "Norwegen", "Aegypten"],
    ),
    "capital": (
        ["Paris", "Madrid", "Lima", "Tokyo", "Nairobi", "Santiago", "Oslo", "Cairo"],
        ["Paris", "Madrid", "Lima", "Tokio", "Nairobi", "Santiago", "Oslo", "Kairo"],
    ),
    "city_name": (
        ["Lyon", "Seville", "Arequipa", "Osaka", "Mombasa", "Valparaiso", "Bergen", "Giza"],
        ["Lyon", "Sevilla", "Arequipa", "Osaka", "Mombasa", "Valparaiso", "Bergen", "Gizeh"],
    ),
    "river_name": (
        ["Rhone", "Ebro", "Amazon", "Shinano", "Tana", "Loa", "Glomma", "Nile"],
        ["Rhone", "Ebro", "Amazonas", "Shinano", "Tana", "Loa", "Glomma", "Nil"],
    ),
    "mouth": (
        ["Gulf of Lion", "Atlantic Ocean", "Sea of Japan", "Indian Ocean",
         "Mediterranean Sea", "Pacific Ocean", "Skagerrak", "North Sea"],
        ["Golf du Lion", "Atlantik", "Japanisches Meer", "Indischer Ozean",
         "Mittelmeer", "Pazifik", "Skagerrak", "Nordsee"],
    ),
}

BILINGUAL_LABELS = {
    # concept -> (english labels, german labels, noise)
    "tbl_country": (["country"], ["land"], 0.10),
    "tbl_city": (["city"], ["stadt"], 0.12),
    "tbl_river": (["river"], ["fluss"], 0.12),
    "lbl_name": (["name"], ["bezeichnung"], 0.10),
    "lbl_capital": (["capital"], ["hauptstadt"], 0.10),
    "lbl_area": (["area"], ["flaeche"], 0.14),
    "lbl_population": (["population"], ["einwohner"], 0.14),
    "lbl_country_ref": (["home country"], ["heimatland"], 0.12),
    "lbl_length": (["length"], ["laenge"], 0.14),
    "lbl_mouth": (["mouth"], ["muendung"], 0.16),
}


def make_bilingual():
    base = ROOT / "bilingual"
    rng = np.random.default_rng(7321991)
    entries = {}

    for concept, (en_labels, de_labels, noise) in BILINGUAL_LABELS.items():
        cbase = unit(rng.normal(size=DIM))
        for label in en_labels + de_labels:
            entries[label.lower()] = [
                float(x) for x in unit(cbase + noise * rng.normal(size=DIM))
            ]

    for family, (en_values, de_values) in BILINGUAL_VALUES.items():
        fbase = unit(rng.normal(size=DIM))
        for en, de in zip(en_values, de_values):
            vbase = unit(fbase + 0.45 * rng.normal(size=DIM))
            for value in {en, de}:
                key = value.lower()
                if key not in entries:
                    entries[key] = [
                        float(x) for x in unit(vbase + 0.12 * rng.normal(size=DIM))
                    ]

    write_json(base / "vectors.json", {"dimension": DIM, "entries": entries})

    write_json(base / "geo_en.json", schema_doc("geo_en", [
        ("country", "countries of the world", [
            ("name", "country name"), ("capital", "capital city"), ("area", "area in km2"),
        ]),
        ("city", "cities", [
            ("name", "city name"), ("population", "inhabitants"), ("home_country", "country the city lies in"),
        ]),
        ("river", "rivers", [
            ("name", "river name"), ("length", "length in km"), ("mouth", "body of water at the mouth"),
        ]),
    ]))
    write_json(base / "geo_de.json", schema_doc("geo_de", [
        ("land", "Staaten der Erde", [
            ("bezeichnung", "Landesname"), ("hauptstadt", "Hauptstadt"), ("flaeche", "Flaeche in km2"),
        ]),
        ("stadt", "Staedte", [
            ("bezeichnung", "Stadtname"), ("einwohner", "Einwohnerzahl"), ("heimatland", "Land der Stadt"),
        ]),
        ("fluss", "Fluesse", [
            ("bezeichnung", "Flussname"), ("laenge", "Laenge in km"), ("muendung", "Gewaesser der Muendung"),
        ]),
    ]))

    en_vals = {k: v[0] for k, v in BILINGUAL_VALUES.items()}
    de_vals = {k: v[1] for k, v in BILINGUAL_VALUES.items()}
    areas = ["643801", "505990", "1285216", "377975", "580367", "756102", "385207", "1010408"]
    populations = ["513000", "688000", "1008000", "2750000", "1208000", "296000", "285000", "4870000"]
    lengths = ["813", "930", "6400", "367", "1000", "440", "621", "6650"]

    write_csv(base / "en_country.csv", ["name", "capital", "area"],
              [en_vals["country_name"], en_vals["capital"], areas])
    write_csv(base / "en_city.csv", ["name", "population", "home_country"],
              [en_vals["city_name"], populations, en_vals["country_name"]])
    write_csv(base / "en_river.csv", ["name", "length", "mouth"],
              [en_vals["river_name"], lengths, en_vals["mouth"]])
    write_csv(base / "de_land.csv", ["bezeichnung", "hauptstadt", "flaeche"],
              [de_vals["country_name"], de_vals["capital"], areas])
    write_csv(base / "de_stadt.csv", ["bezeichnung", "einwohner", "heimatland"],
              [de_vals["city_name"], populations, de_vals["country_name"]])
    write_csv(base / "de_fluss.csv", ["bezeichnung", "laenge", "muendung"],
              [de_vals["river_name"], lengths, de_vals["mouth"]])

    write_json(base / "gold.json", {
        "table_pairs": [["country", "land"], ["city", "stadt"], ["river", "fluss"]],
        "attribute_pairs": [
            [["country", "name"], ["land", "bezeichnung"]],
            [["country", "capital"], ["land", "hauptstadt"]],
            [["country", "area"], ["land", "flaeche"]],
            [["city", "name"], ["stadt", "bezeichnung"]],
            [["city", "population"], ["stadt", "einwohner"]],
            [["city", "home_country"], ["stadt", "heimatland"]],
            [["river", "name"], ["fluss", "bezeichnung"]],
            [["river", "length"], ["fluss", "laenge"]],
            [["river", "mouth"], ["fluss", "muendung"]],
        ],
    })

    write_json(base / "manifest.json", {
        "problems": [
            {
                "id": "geo-en-de",
                "source_schema": "geo_en.json",
                "target_schema": "geo_de.json",
                "alignment": "gold.json",
                "source_instances": {
                    "country": "en_country.csv", "city": "en_city.csv", "river": "en_river.csv",
                },
                "target_instances": {
                    "land": "de_land.csv", "stadt": "de_stadt.csv", "fluss": "de_fluss.csv",
                },
            }
        ]
    })


if __name__ == "__main__":
    make_selfmatch()
    make_movies()
    make_bilingual()
    print(f"fixtures written under {ROOT}")
