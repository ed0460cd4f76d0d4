"""End-to-end checks of the command-line tool.

usage: cli_smoke.py <plimit binary> <docs dir>
"""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource

BIN, DOCS = sys.argv[1], pathlib.Path(sys.argv[2])
failures = []


def schema(name):
    s = json.loads((DOCS / f"{name}.schema.json").read_text())
    config = Resource.from_contents(json.loads((DOCS / "config.schema.json").read_text()))
    registry = Registry().with_resource("config.schema.json", config)
    return lambda doc: jsonschema.validate(doc, s, registry=registry)


def run(*args, expect=0, cwd):
    p = subprocess.run([BIN, *map(str, args)], cwd=cwd, capture_output=True, text=True)
    if p.returncode != expect:
        failures.append(f"{' '.join(map(str, args))}: exit {p.returncode}, expected {expect}\n{p.stderr}")
    return p


def check(cond, what):
    if not cond:
        failures.append(what)


def error_record(p, kind):
    try:
        rec = json.loads(p.stderr.strip().splitlines()[-1])
        schema("error")(rec)
        check(rec["error"]["type"] == kind, f"error type {rec['error']['type']} != {kind}")
    except Exception as e:  # noqa: BLE001
        failures.append(f"bad error record: {e}: {p.stderr!r}")


def pipeline(d):
    d = pathlib.Path(d)
    (d / "g.csv").write_text("node_index,value\n0,0\n1,3\n")
    (d / "u0.csv").write_text("node_index,value\n0,0\n1,0\n")
    (d / "mu.csv").write_text("node_index,value\n0,1\n1,0\n")
    (d / "nu.csv").write_text("node_index,value\n0,0\n1,1\n")
    (d / "src.json").write_text('{"type": "two_point", "values": [0, 1]}')
    (d / "gamma.json").write_text('{"nodes": [0]}')
    run("--out-dir", "o", "mesh", "--shape", "interval", "--n", 4, "--out", "i.json", "--geo", "ig.json", cwd=d)
    run("--out-dir", "o", "mesh", "--shape", "square", "--h", 0.25, "--out", "s.json", "--geo", "sg.json", cwd=d)
    run("project", "--mesh", "o/i.json", "--geo", "o/ig.json", "--in", "g.csv", "--out", "o/v.csv",
        "--report", "o/project.json", cwd=d)
    run("prox-ep", "--mesh", "o/i.json", "--g", "g.csv", "--lambda", 1, "--p", 4, "--out", "o/prox.csv", cwd=d)
    run("extend", "--mesh", "o/i.json", "--boundary", "g.csv", "--p", 8, "--out", "o/ext.csv", cwd=d)
    run("evolve", "--functional", "einf", "--mesh", "o/i.json", "--tau", 0.01, "--T", 2, "--u0", "u0.csv",
        "--source", "src.json", "--out", "o/traj.csv", "--report", "o/bounds.json", cwd=d)
    run("evolve", "--functional", "ep", "--p", 8, "--mesh", "o/i.json", "--tau", 0.1, "--T", 1, "--u0", "u0.csv",
        "--source", "src.json", "--out", "o/traj_ep.csv", "--report", "o/bounds_ep.json", cwd=d)
    run("verify-potential", "--traj", "o/traj.csv", "--source", "src.json", "--mesh", "o/i.json", "--t", 1.5,
        "--report", "o/gap.json", cwd=d)
    run("transport", "--geo", "o/ig.json", "--mu", "mu.csv", "--nu", "nu.csv", "--out", "o/plan.csv",
        "--dual", "o/pot.csv", "--report", "o/transport.json", cwd=d)
    run("sandpile", "--mesh", "o/s.json", "--gamma", "gamma.json", "--t", 0.5, "--out", "o/sand.csv", cwd=d)
    run("mosco", "--mesh", "o/i.json", "--g", "g.csv", "--lambdas", "0.5,1", "--pladder", "4,16",
        "--report", "o/mosco.json", cwd=d)
    run("--out-dir", "o", "example", "--id", 1, "--tau", 0.01, "--T", 2, "--p", 4, cwd=d)
    (d / "cfg.json").write_text('{"example2": {"tau": 0.001}}')
    run("--seed", 7, "suite", "--config", "cfg.json", "--criteria", "2", "--no-timing",
        "--report", "o/suite.json", cwd=d)
    return d / "o"


with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
    oa, ob = pipeline(a), pipeline(b)
    files = sorted(p.relative_to(oa) for p in oa.rglob("*") if p.is_file())
    check(len(files) >= 20, f"only {len(files)} outputs")
    for f in files:
        check((oa / f).read_bytes() == (ob / f).read_bytes(), f"{f} differs between identical runs")

    schema("mesh")(json.loads((oa / "i.json").read_text()))
    schema("mesh")(json.loads((oa / "s.json").read_text()))
    schema("geo")(json.loads((oa / "sg.json").read_text()))
    schema("mosco")(json.loads((oa / "mosco.json").read_text()))
    suite = json.loads((oa / "suite.json").read_text())
    schema("report")(suite)
    check(suite["config"]["seed"] == 7, "--seed did not reach the suite config")
    check("runtime_s" not in suite["criteria"][0], "--no-timing kept runtimes")

    proj = (oa / "v.csv").read_text().splitlines()
    check(proj == ["node_index,value", "0,1", "1,2"], f"projection output {proj}")
    plan = (oa / "plan.csv").read_text().splitlines()
    check(plan == ["from_node,to_node,mass", "0,1,1"], f"plan output {plan}")
    gap = json.loads((oa / "gap.json").read_text())
    check(abs(gap["relative_gap"]) <= 1e-6, f"gap {gap}")
    summary = json.loads((oa / "example1_summary.json").read_text())
    check(summary["pass"] is True, f"example 1 summary {summary}")
    header = (oa / "example1_trajectories.csv").read_text().splitlines()[0]
    check(header == "t,node_index,exact,flow,ep_p4", header)

    d = pathlib.Path(a)
    (d / "empty.json").write_text("{}")
    (d / "blank.json").write_text("")
    error_record(run("suite", "--config", "empty.json", expect=2, cwd=d), "usage")
    error_record(run("suite", "--config", "blank.json", expect=2, cwd=d), "usage")
    error_record(run("suite", expect=2, cwd=d), "usage")
    error_record(run("mesh", "--shape", "torus", "--out", "x.json", expect=2, cwd=d), "usage")
    error_record(run("project", "--mesh", "nope.json", "--in", "g.csv", "--out", "x.csv", expect=3, cwd=d),
                 "invalid_input")
    (d / "nu2.csv").write_text("node_index,value\n0,0\n1,2\n")
    error_record(run("transport", "--geo", "o/ig.json", "--mu", "mu.csv", "--nu", "nu2.csv", "--out", "x.csv",
                     expect=3, cwd=d), "unbalanced_masses")
    (d / "bad.json").write_text('{"bogus": 1}')
    error_record(run("suite", "--config", "bad.json", expect=3, cwd=d), "invalid_input")

if failures:
    print("\n".join(failures))
    sys.exit(1)
print("cli smoke: all checks passed")
