#!/usr/bin/env python3
"""MILP solve wrapper: reads a free-format MPS file, solves it with
scipy.optimize.milp (HiGHS), and writes a plain solution file:

    =status= optimal|infeasible|gap-limit|time-limit
    =obj= <value>
    =gap= <value>
    <variable> <value>

Usage: scipy_milp_solve.py MODEL.mps SOLUTION.sol [MIP_GAP] [TIME_LIMIT_S]
"""

import sys

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

INF = float("inf")


def parse_mps(path):
    sense = 1.0  # minimize
    rows = []  # (type, name)
    obj_row = None
    entries = []  # (col, row, value)
    col_order = []
    col_seen = set()
    col_integer = {}
    rhs = {}
    bounds = {}
    in_integer = False
    section = None
    expect_objsense = False

    with open(path) as fh:
        for line in fh:
            if not line.strip() or line.startswith("*"):
                continue
            indented = line[0] in " \t"
            fields = line.split()
            if not indented:
                head = fields[0]
                if head == "NAME":
                    continue
                if head == "OBJSENSE":
                    if len(fields) > 1:
                        sense = -1.0 if fields[1].startswith("MAX") else 1.0
                    else:
                        expect_objsense = True
                    continue
                if head in ("ROWS", "COLUMNS", "RHS", "BOUNDS", "RANGES"):
                    section = head
                    continue
                if head == "ENDATA":
                    break
                raise SystemExit(f"unsupported MPS section: {head}")

            if expect_objsense:
                sense = -1.0 if fields[0].startswith("MAX") else 1.0
                expect_objsense = False
                continue

            if section == "ROWS":
                rtype, rname = fields[0], fields[1]
                if rtype == "N":
                    if obj_row is None:
                        obj_row = rname
                else:
                    rows.append((rtype, rname))
            elif section == "COLUMNS":
                if len(fields) >= 3 and fields[1] == "'MARKER'":
                    in_integer = fields[2] == "'INTORG'"
                    continue
                col = fields[0]
                if col not in col_seen:
                    col_seen.add(col)
                    col_order.append(col)
                    col_integer[col] = in_integer
                for i in range(1, len(fields) - 1, 2):
                    entries.append((col, fields[i], float(fields[i + 1])))
            elif section == "RHS":
                for i in range(1, len(fields) - 1, 2):
                    rhs[fields[i]] = float(fields[i + 1])
            elif section == "BOUNDS":
                kind, col = fields[0], fields[2]
                if col not in col_seen:
                    col_seen.add(col)
                    col_order.append(col)
                    col_integer[col] = False
                lo, hi = bounds.get(col, (0.0, INF))
                if kind == "BV":
                    lo, hi = 0.0, 1.0
                    col_integer[col] = True
                elif kind == "FR":
                    lo, hi = -INF, INF
                elif kind == "MI":
                    lo = -INF
                elif kind == "LO":
                    lo = float(fields[3])
                elif kind == "UP":
                    hi = float(fields[3])
                elif kind == "FX":
                    lo = hi = float(fields[3])
                else:
                    raise SystemExit(f"unsupported bound type: {kind}")
                bounds[col] = (lo, hi)
            elif section == "RANGES":
                raise SystemExit("RANGES not supported")

    col_index = {c: i for i, c in enumerate(col_order)}
    ncols = len(col_order)
    c = np.zeros(ncols)
    row_index = {name: i for i, (_, name) in enumerate(rows)}
    data, ri, ci = [], [], []
    for col, row, value in entries:
        if row == obj_row:
            c[col_index[col]] += value
        else:
            ri.append(row_index[row])
            ci.append(col_index[col])
            data.append(value)
    a = sparse.coo_matrix((data, (ri, ci)), shape=(len(rows), ncols)).tocsr()

    lower = np.full(len(rows), -INF)
    upper = np.full(len(rows), INF)
    for i, (rtype, rname) in enumerate(rows):
        b = rhs.get(rname, 0.0)
        if rtype == "L":
            upper[i] = b
        elif rtype == "G":
            lower[i] = b
        else:
            lower[i] = upper[i] = b

    lo = np.zeros(ncols)
    hi = np.full(ncols, INF)
    for col, (blo, bhi) in bounds.items():
        lo[col_index[col]] = blo
        hi[col_index[col]] = bhi
    integrality = np.array([1 if col_integer[col] else 0 for col in col_order])
    return sense, c, a, lower, upper, lo, hi, integrality, col_order


def main():
    if len(sys.argv) < 3:
        raise SystemExit(__doc__)
    model_path, solution_path = sys.argv[1], sys.argv[2]
    mip_gap = float(sys.argv[3]) if len(sys.argv) > 3 else 1e-5
    time_limit = float(sys.argv[4]) if len(sys.argv) > 4 else 0.0

    sense, c, a, lower, upper, lo, hi, integrality, names = parse_mps(model_path)
    options = {"mip_rel_gap": mip_gap, "presolve": True}
    if time_limit > 0:
        options["time_limit"] = time_limit
    result = milp(
        c=sense * c,
        constraints=LinearConstraint(a, lower, upper),
        bounds=Bounds(lo, hi),
        integrality=integrality,
        options=options,
    )

    # scipy statuses: 0 optimal, 1 iteration/time limit, 2 infeasible,
    # 3 unbounded, 4 other
    if result.status == 0:
        status = "optimal"
    elif result.status == 1:
        status = "time-limit"
    elif result.status == 2:
        status = "infeasible"
    else:
        raise SystemExit(f"solver failed: {result.message}")

    with open(solution_path, "w") as out:
        out.write(f"=status= {status}\n")
        if result.x is not None:
            objective = float(sense * result.fun)
            gap = float(result.mip_gap) if result.mip_gap is not None else 0.0
            out.write(f"=obj= {objective!r}\n")
            out.write(f"=gap= {gap!r}\n")
            for name, value in zip(names, result.x):
                out.write(f"{name} {float(value)!r}\n")


if __name__ == "__main__":
    main()
