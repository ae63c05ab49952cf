"""Validate the tool's JSON outputs against the schemas in schemas/."""

import json
import pathlib
import subprocess
import sys

import jsonschema

cli, src, work = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
work.mkdir(parents=True, exist_ok=True)


def schema(name):
    doc = json.loads((src / "schemas" / name).read_text())
    jsonschema.Draft202012Validator.check_schema(doc)
    return jsonschema.Draft202012Validator(doc)


def run(*args, ok=(0,)):
    proc = subprocess.run([cli, *args], capture_output=True, text=True)
    if proc.returncode not in ok:
        sys.exit(f"{' '.join(args)} exited {proc.returncode}: {proc.stderr}")
    return proc.stdout


verdict = schema("verdict.schema.json")
errors = 0


def check(validator, doc, label):
    global errors
    problems = sorted(validator.iter_errors(doc), key=str)
    for p in problems:
        print(f"{label}: {p.json_path}: {p.message}")
    errors += len(problems)


cases = [
    ("fig1", []), ("fig2a", []), ("fig2b", ["--external", "W"]), ("fig2c", []),
    ("fig3a", []), ("fig3b", ["--external", "W1,W2,W3"]), ("fig3c", ["--external", "W1,W3"]),
    ("fig3c", ["--external", "W1,W4"]), ("fig9", ["--external", "W1,W2,W3,W4"]),
    ("pneumonia", ["--external", "Z"]), ("continuous_advanced", ["--external", "W,Z"]),
]
kinds = set()
for fixture, extra in cases:
    out = run("--json", "decide", str(src / "fixtures" / f"{fixture}.graph"), *extra, ok=(0, 2))
    doc = json.loads(out)
    kinds.add(doc["kind"])
    check(verdict, doc, f"verdict {fixture}")
if kinds != {"natural", "recoverable", "failure"}:
    print(f"expected every verdict kind among the cases, got {sorted(kinds)}")
    errors += 1

# Negative control: a verdict without plans must be rejected.
broken = json.loads(run("--json", "decide", str(src / "fixtures" / "fig2a.graph")))
del broken["plans"]
if verdict.is_valid(broken):
    print("schema accepted a verdict without plans")
    errors += 1

out_dir = work / "sim"
run("--seed", "5", "--out", str(out_dir), "simulate", "--model", "basic", "--n", "300")
rec_dir = work / "rec"
run("--out", str(rec_dir), "recover-continuous", "--biased", str(out_dir / "biased.csv"),
    "--external", str(out_dir / "external.csv"), "--x", "0")
metrics = json.loads(run("metrics", str(rec_dir / "recovered_x0.csv"), str(rec_dir / "biased_x0.csv")))
check(schema("error_report.schema.json"), metrics, "metrics")

manifest = schema("manifest.schema.json")
for d in (out_dir, rec_dir):
    check(manifest, json.loads((d / "manifest.json").read_text()), f"manifest {d.name}")

print("schema validation:", "ok" if errors == 0 else f"{errors} problem(s)")
sys.exit(1 if errors else 0)
