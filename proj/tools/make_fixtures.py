"""Regenerates tests/data/fixtures.json.

Draws 200 small random instances (|I| <= 5, |J| <= 4, K = 2) from the C++
generator and solves each by plain enumeration in Python: every assignment,
every charger count from the stability minimum to the capacity, Erlang C by
direct factorial summation. Optima are recorded with and without the
closest-active-station rule.

    PYTHONPATH=build/python python3 tools/make_fixtures.py tests/data/fixtures.json
"""

import itertools
import json
import math
import sys

import placebeb


def erlang_c_direct(load, mu, s):
    a = load / mu
    rho = a / s
    head = sum(a**n / math.factorial(n) for n in range(s))
    tail = a**s / math.factorial(s) / (1.0 - rho)
    return tail / (head + tail)


def wait(load, mu, s):
    rho = load / (mu * s)
    return erlang_c_direct(load, mu, s) / (mu * s * (1.0 - rho)) + 1.0 / mu


def solve(inst, proximity):
    demands = inst["demand_points"]
    stations = {s["id"]: n for n, s in enumerate(inst["stations"])}
    types = inst["charger_types"]
    eps = inst["options"]["epsilon"]
    c_travel = inst["costs"]["travel_cost_rate"]
    c_wait = inst["costs"]["wait_cost_rate"]
    travel = {(t["demand"], t["station"]): t["minutes"] for t in inst["travel"]}

    group_memo = {}

    def group(j, k, members):
        key = (j, k, members)
        if key not in group_memo:
            mu = types[k]["service_rate"]
            load = sum(demands[i]["rate"] for i in members)
            cap = inst["stations"][j]["max_chargers"][k]
            best = math.inf
            for s in range(1, cap + 1):
                if mu * s * (1.0 - eps) < load:
                    continue
                cost = types[k]["unit_cost_rate"] * s + c_wait * load * wait(load, mu, s)
                best = min(best, cost)
            group_memo[key] = best
        return group_memo[key]

    options = []
    for d in demands:
        options.append([(stations[j], k) for j in d["reachable_stations"] for k in range(len(types))])

    best = math.inf
    for choice in itertools.product(*options):
        used = {j for j, _ in choice}
        if proximity:
            ok = True
            for i, (j, _) in enumerate(choice):
                did = demands[i]["id"]
                mine = travel[(did, inst["stations"][j]["id"])]
                for other in used:
                    key = (did, inst["stations"][other]["id"])
                    if key in travel and travel[key] < mine:
                        ok = False
            if not ok:
                continue
        members = {}
        for i, (j, k) in enumerate(choice):
            members.setdefault((j, k), []).append(i)
        total = sum(inst["stations"][j]["fixed_cost_rate"] for j in used)
        for i, (j, _) in enumerate(choice):
            total += demands[i]["rate"] * c_travel * travel[(demands[i]["id"], inst["stations"][j]["id"])]
        for (j, k), ms in members.items():
            total += group(j, k, tuple(ms))
        best = min(best, total)
    return best


def main(path):
    fixtures = []
    for seed in range(200):
        n_demands = 1 + seed % 5
        n_stations = 1 + (seed // 5) % 4
        inst = placebeb.random_instance(seed, demands=n_demands, stations=n_stations, charger_types=2)
        fixtures.append(
            {
                "seed": seed,
                "instance": inst,
                "optimum": solve(inst, False),
                "optimum_proximity": solve(inst, True),
            }
        )
    with open(path, "w") as f:
        json.dump({"fixtures": fixtures}, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1])
