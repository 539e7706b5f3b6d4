"""Cross-check the benchmark command against scipy's LP solver and brute force."""

import itertools
import json
import random
import subprocess
import sys

from scipy.optimize import linprog

TOL = 1e-6


def best_within(values, feasible, mask):
    return max((sum(values[i] for i in f) for f in feasible if set(f) <= mask), default=0.0)


def core_rev(values, feasible):
    n = len(values)
    everyone = set(range(n))
    w = best_within(values, feasible, everyone)
    # Variables u0 (seller), u1..un (bidders): minimise u0.
    c = [1.0] + [0.0] * n
    a_ub, b_ub = [], []
    for r in range(n + 1):
        for coalition in itertools.combinations(range(n), r):
            row = [-1.0] + [0.0] * n
            for i in coalition:
                row[i + 1] = -1.0
            a_ub.append(row)
            b_ub.append(-best_within(values, feasible, set(coalition)))
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=[[1.0] * (n + 1)], b_eq=[w],
                  bounds=[(0, None)] * (n + 1), method="highs")
    if res.status != 0:
        raise RuntimeError(res.message)
    return res.fun


def efficient_set(values, feasible):
    w = max(sum(values[i] for i in f) for f in feasible)
    return min(sorted(f) for f in feasible if sum(values[i] for i in f) == w)


def vcg_rev(values, feasible):
    everyone = set(range(len(values)))
    w = best_within(values, feasible, everyone)
    return sum(best_within(values, feasible, everyone - {i}) - (w - values[i])
               for i in efficient_set(values, feasible))


def mv_rev(values, feasible):
    # Best welfare once the highest bidder (lowest id on ties) is removed.
    top = values.index(max(values))
    return best_within(values, feasible, set(range(len(values))) - {top})


def random_environment(rng):
    n = rng.randint(1, 6)
    values = [float(rng.randint(0, 9)) for _ in range(n)]
    feasible = [[]]
    for r in range(1, n + 1):
        for coalition in itertools.combinations(range(n), r):
            if rng.random() < 0.35:
                feasible.append(list(coalition))
    return values, feasible


def main():
    cli, scratch = sys.argv[1], sys.argv[2]
    rng = random.Random(20240611)
    failures = 0
    trials = 150
    for t in range(trials):
        values, feasible = random_environment(rng)
        path = f"{scratch}/oracle_env_{t}.json"
        with open(path, "w") as fh:
            json.dump({"values": values, "feasible": feasible}, fh)
        out = subprocess.run([cli, "benchmark", "--env", path], capture_output=True, text=True, check=True)
        got = json.loads(out.stdout)
        expected = {
            "coreRev": core_rev(values, feasible),
            "vcgRev": vcg_rev(values, feasible),
            "mvRev": mv_rev(values, feasible),
        }
        for key, want in expected.items():
            if abs(got[key] - want) > TOL:
                failures += 1
                print(f"trial {t} {key}: got {got[key]} want {want} env {values} {feasible}")
    print(f"{trials} environments, {failures} mismatches")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
