"""Runs the CLI and validates its JSON output against the published schemas."""

import json
import pathlib
import random
import subprocess
import sys
import tempfile

import jsonschema


def run(binary, *args):
    proc = subprocess.run([binary, *args], capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr


def main():
    binary, schema_dir = sys.argv[1], pathlib.Path(sys.argv[2])
    params_schema = json.loads((schema_dir / "params_result.schema.json").read_text())
    run_schema = json.loads((schema_dir / "run_result.schema.json").read_text())

    for assumption, expected in (("unimodal", 0), ("r-concave", 0), ("none", 2)):
        code, out, err = run(binary, "params", "--p", "57", "--q", "10", "--pfer", "1",
                             "--assumption", assumption)
        assert code == expected, (assumption, code, err)
        jsonschema.validate(json.loads(out), params_schema)

    rng = random.Random(3)
    with tempfile.TemporaryDirectory() as tmp:
        data = pathlib.Path(tmp) / "toy.csv"
        rows = ["a,b,c,d,y"]
        for _ in range(30):
            x = [rng.gauss(0, 1) for _ in range(4)]
            rows.append(",".join(f"{v:.6f}" for v in x) + f",{int(x[0] + rng.gauss(0, 0.5) > 0)}")
        data.write_text("\n".join(rows) + "\n")
        for extra in (["--cutoff", "0.75"], ["--pfer", "1", "--assumption", "r-concave"]):
            code, out, err = run(binary, "run", "--data", str(data), "--response", "y",
                                 "--family", "binomial", "--q", "2", "--B", "10", *extra)
            assert code == 0, err
            jsonschema.validate(json.loads(out), run_schema)
    print("schemas ok")


if __name__ == "__main__":
    main()
