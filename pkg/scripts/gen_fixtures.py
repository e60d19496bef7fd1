"""Regenerate the synthetic 200-row dataset fixtures under data/.

The fixtures match the Adult Income and Law School column schemas so the
ingestion and sweep code paths can run in CI without the real datasets.
Values are drawn with a fixed seed and carry a learnable signal (the label
correlates with a couple of numeric columns, with a group-dependent shift)
so trained classifiers are non-trivial.
"""

import csv
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "data"

WORKCLASS = ["Private", "Self-emp-not-inc", "Local-gov", "State-gov", "Federal-gov", "Without-pay", "Never-worked"]
EDUCATION = ["Bachelors", "HS-grad", "11th", "Masters", "Some-college", "Assoc-acdm", "Doctorate"]
MARITAL = ["Married-civ-spouse", "Never-married", "Divorced", "Separated", "Widowed"]
OCCUPATION = ["Tech-support", "Craft-repair", "Sales", "Exec-managerial", "Prof-specialty", "Handlers-cleaners"]
RELATIONSHIP = ["Husband", "Wife", "Own-child", "Not-in-family", "Unmarried", "Other-relative"]
RACE = ["White", "Black", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other"]
COUNTRY = ["United-States", "Mexico", "Philippines", "Germany", "Canada", "India"]
FAM_INC = ["1", "2", "3", "4", "5"]
TIER = ["1", "2", "3", "4", "5", "6"]
RACETXT = ["white", "black", "hispanic", "asian", "other", "unknown"]


def gen_adult(n=200, seed=20240501):
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(n):
        gender = "Male" if rng.random() < 0.6 else "Female"
        edu_num = int(rng.integers(1, 17))
        hours = int(np.clip(rng.normal(40, 10), 1, 99))
        age = int(np.clip(rng.normal(39, 12), 17, 90))
        score = 0.25 * (edu_num - 9) + 0.04 * (hours - 40) + (0.6 if gender == "Male" else 0.0)
        y = rng.random() < 1.0 / (1.0 + np.exp(-(score - 0.4)))
        rows.append(
            {
                "age": age,
                "workclass": WORKCLASS[rng.integers(len(WORKCLASS))],
                "fnlwgt": int(rng.integers(13492, 1490400)),
                "education": EDUCATION[rng.integers(len(EDUCATION))],
                "educational-num": edu_num,
                "marital-status": MARITAL[rng.integers(len(MARITAL))],
                "occupation": OCCUPATION[rng.integers(len(OCCUPATION))],
                "relationship": RELATIONSHIP[rng.integers(len(RELATIONSHIP))],
                "race": RACE[rng.integers(len(RACE))],
                "gender": gender,
                "capital-gain": int(rng.choice([0, 0, 0, 0, 2000, 5000, 15000])),
                "capital-loss": int(rng.choice([0, 0, 0, 0, 800, 1500])),
                "hours-per-week": hours,
                "native-country": COUNTRY[rng.integers(len(COUNTRY))],
                "income": ">50K" if y else "<=50K",
            }
        )
    # make sure every (gender, income) cell is populated
    rows[0].update(gender="Female", income=">50K")
    rows[1].update(gender="Female", income="<=50K")
    rows[2].update(gender="Male", income=">50K")
    rows[3].update(gender="Male", income="<=50K")
    return rows


def gen_law(n=200, seed=20240502):
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(n):
        male = int(rng.random() < 0.55)
        lsat = float(np.clip(rng.normal(33, 6), 11, 48))
        ugpa = float(np.clip(rng.normal(3.2, 0.4), 1.5, 4.0))
        zfygpa = float(np.clip(rng.normal(0, 1), -3.35, 3.48))
        score = 0.12 * (lsat - 33) + 0.8 * (ugpa - 3.2) + 0.3 * zfygpa + (0.4 if male else 0.0)
        y = int(rng.random() < 1.0 / (1.0 + np.exp(-(score + 0.8))))
        rows.append(
            {
                "decile1b": round(float(np.clip(rng.normal(5.5, 2.5), 1, 10)), 1),
                "decile3": round(float(np.clip(rng.normal(5.5, 2.5), 1, 10)), 1),
                "lsat": round(lsat, 1),
                "ugpa": round(ugpa, 2),
                "zfygpa": round(zfygpa, 2),
                "zgpa": round(float(np.clip(rng.normal(0, 1.2), -6.44, 4.01)), 2),
                "fulltime": int(rng.choice([1, 1, 1, 2])),
                "fam inc": FAM_INC[rng.integers(len(FAM_INC))],
                "male": male,
                "tier": TIER[rng.integers(len(TIER))],
                "racetxt": RACETXT[rng.integers(len(RACETXT))],
                "pass bar": y,
            }
        )
    rows[0].update(male=0, **{"pass bar": 1})
    rows[1].update(male=0, **{"pass bar": 0})
    rows[2].update(male=1, **{"pass bar": 1})
    rows[3].update(male=1, **{"pass bar": 0})
    return rows


def write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        w.writeheader()
        w.writerows(rows)
    print(f"wrote {len(rows)} rows to {path}")


if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    write_csv(OUT / "adult_fixture.csv", gen_adult())
    write_csv(OUT / "law_fixture.csv", gen_law())
