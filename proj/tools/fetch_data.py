#!/usr/bin/env python3
# Copyright 2026 The DPSynth Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Downloads the six public benchmark datasets and writes <id>.csv plus an
<id>.schema.json sidecar for each. Nothing is redistributed with the repo."""

import argparse
import io
import json
import os
import sys
import zipfile

import pandas as pd
import requests

UCI = "https://archive.ics.uci.edu/static/public"

# id -> (url, reader, target column, positive handling)
DATASETS = {
    "ad": dict(url=f"{UCI}/2/adult.zip", member="adult.data", header=None,
               names=["age", "workclass", "fnlwgt", "education",
                      "education_num", "marital_status", "occupation",
                      "relationship", "race", "sex", "capital_gain",
                      "capital_loss", "hours_per_week", "native_country",
                      "income"],
               target="income"),
    "bc": dict(url=f"{UCI}/17/breast+cancer+wisconsin+diagnostic.zip",
               member="wdbc.data", header=None,
               names=["id", "diagnosis"] + [f"f{i}" for i in range(30)],
               target="diagnosis", drop=["id"]),
    "bm": dict(url=f"{UCI}/222/bank+marketing.zip",
               member="bank-additional/bank-additional-full.csv", sep=";",
               nested="bank-additional.zip", target="y"),
    "cc": dict(url=f"{UCI}/350/default+of+credit+card+clients.zip",
               member="default of credit card clients.xls", excel=True,
               target="default payment next month", drop=["ID"]),
    "cr": dict(url=f"{UCI}/144/statlog+german+credit+data.zip",
               member="german.data", header=None, sep=" ",
               names=[f"a{i}" for i in range(1, 21)] + ["credit"],
               target="credit"),
    # Kaggle requires a login: download cs-training.csv by hand and pass
    # --gm-csv.
    "gm": dict(local=True, target="SeriousDlqin2yrs", drop=["Unnamed: 0"]),
}

MAX_CATEGORIES = 50


def read_member(spec, gm_csv):
    if spec.get("local"):
        if not gm_csv:
            raise ValueError("pass --gm-csv with Kaggle's cs-training.csv")
        return pd.read_csv(gm_csv)
    response = requests.get(spec["url"], timeout=120)
    response.raise_for_status()
    archive = zipfile.ZipFile(io.BytesIO(response.content))
    if "nested" in spec:
        archive = zipfile.ZipFile(io.BytesIO(archive.read(spec["nested"])))
    data = archive.read(spec["member"])
    if spec.get("excel"):
        return pd.read_excel(io.BytesIO(data), header=1)
    return pd.read_csv(io.BytesIO(data), header=spec.get("header", "infer"),
                       names=spec.get("names"), sep=spec.get("sep", ","),
                       skipinitialspace=True)


def to_schema(frame, target):
    columns = []
    for name in frame.columns:
        series = frame[name]
        numeric = pd.api.types.is_numeric_dtype(series)
        if name == target or not numeric or series.nunique() <= 2:
            categories = sorted(series.astype(str).unique().tolist())
            if name != target and len(categories) > MAX_CATEGORIES:
                raise ValueError(f"column {name} has too many categories")
            columns.append({"name": name, "type": "categorical",
                            "categories": categories})
        else:
            columns.append({"name": name, "type": "continuous",
                            "min": float(series.min()),
                            "max": float(series.max())})
    return {"target": target, "columns": columns}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True)
    parser.add_argument("--datasets", nargs="*", default=sorted(DATASETS))
    parser.add_argument("--gm-csv", default="")
    args = parser.parse_args()
    os.makedirs(args.out, exist_ok=True)
    failed = False
    for dataset in args.datasets:
        spec = DATASETS[dataset]
        try:
            frame = read_member(spec, args.gm_csv)
            frame = frame.drop(columns=spec.get("drop", []), errors="ignore")
            frame = frame.replace("?", pd.NA).dropna().reset_index(drop=True)
            frame.columns = [str(c).strip().replace(" ", "_") for c in frame.columns]
            target = spec["target"].replace(" ", "_")
            for name in frame.columns:
                if not pd.api.types.is_numeric_dtype(frame[name]):
                    frame[name] = frame[name].astype(str).str.strip().str.rstrip(".")
            schema = to_schema(frame, target)
            if len(schema["columns"][frame.columns.get_loc(target)]["categories"]) != 2:
                raise ValueError("target is not binary")
            for column in schema["columns"]:
                if column["type"] == "categorical":
                    frame[column["name"]] = frame[column["name"]].astype(str)
            frame.to_csv(os.path.join(args.out, f"{dataset}.csv"), index=False)
            with open(os.path.join(args.out, f"{dataset}.schema.json"), "w") as f:
                json.dump(schema, f, indent=2)
            print(f"{dataset}: {len(frame)} rows")
        except Exception as error:  # keep going; report at the end
            failed = True
            print(f"{dataset}: failed: {error}", file=sys.stderr)
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
