#!/usr/bin/env python3
"""Reference MILP runner for the exported model files.

Parses the exported subset of CPLEX LP or fixed MPS independently of the
C++ writer, solves with scipy's HiGHS-backed milp, and writes a solution
file with a "Model status" header, an "Objective" line, and a "# Columns"
name/value section. With --digest it instead emits a canonical rendering
of the parsed matrix (sorted, zero coefficients dropped) plus its sha256,
which lets tests assert that two formats encode the same model.
"""

import argparse
import hashlib
import math
import re
import sys

NAME = r"[A-Za-z_][A-Za-z0-9_\[\],\.]*"
NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"


class Var:
    __slots__ = ("name", "lb", "ub", "integer", "obj")

    def __init__(self, name):
        self.name = name
        self.lb = 0.0
        self.ub = math.inf
        self.integer = False
        self.obj = 0.0


class Row:
    __slots__ = ("name", "sense", "rhs", "terms")

    def __init__(self, name, sense, rhs):
        self.name = name
        self.sense = sense  # 'L', 'G', 'E'
        self.rhs = rhs
        self.terms = {}  # var name -> coefficient


class Model:
    def __init__(self):
        self.name = ""
        self.vars = {}
        self.order = []
        self.rows = []
        self.obj_constant = 0.0

    def var(self, name):
        v = self.vars.get(name)
        if v is None:
            v = Var(name)
            self.vars[name] = v
            self.order.append(v)
        return v


def parse_expr(model, text):
    """Linear expression -> ({var name: coef}, constant)."""
    terms = {}
    const = 0.0
    sign = 1.0
    coef = None
    for m in re.finditer(rf"({NAME})|({NUM})|([+-])", text):
        name, number, op = m.group(1), m.group(2), m.group(3)
        if op:
            if coef is not None:
                const += sign * coef
                coef = None
            sign = -1.0 if op == "-" else 1.0
        elif number is not None and name is None:
            if coef is not None:
                const += sign * coef
                sign = 1.0
            coef = float(number)
        else:
            model.var(name)
            terms[name] = terms.get(name, 0.0) + sign * (1.0 if coef is None else coef)
            sign = 1.0
            coef = None
    if coef is not None:
        const += sign * coef
    return terms, const


def parse_lp(text):
    model = Model()
    lines = []
    for raw in text.splitlines():
        line = raw.split("\\")[0]
        if line.strip():
            lines.append(line)

    section = None
    buckets = {"obj": [], "rows": [], "bounds": [], "bin": [], "gen": []}
    for line in lines:
        low = " ".join(line.strip().lower().split())
        if low in ("minimize", "maximize", "min", "max"):
            if low.startswith("max"):
                raise ValueError("maximization models are not supported")
            section = "obj"
        elif low in ("subject to", "such that", "st", "s.t."):
            section = "rows"
        elif low == "bounds":
            section = "bounds"
        elif low in ("binary", "binaries", "bin"):
            section = "bin"
        elif low in ("general", "generals", "gen"):
            section = "gen"
        elif low == "end":
            section = None
        elif section is None:
            raise ValueError(f"unexpected text outside any LP section: {line.strip()}")
        else:
            buckets[section].append(line)

    objtext = " ".join(buckets["obj"])
    objtext = re.sub(rf"^\s*({NAME})\s*:", "", objtext)
    terms, const = parse_expr(model, objtext)
    for name, coef in terms.items():
        model.var(name).obj += coef
    model.obj_constant = const

    rowtext = " ".join(buckets["rows"])
    pieces = re.split(rf"({NAME})\s*:", rowtext)
    # pieces: [leading, name1, body1, name2, body2, ...]
    if pieces[0].strip():
        raise ValueError("constraint without a label: " + pieces[0])
    senses = {"<=": "L", ">=": "G", "=": "E", "<": "L", ">": "G"}
    for k in range(1, len(pieces), 2):
        name, body = pieces[k], pieces[k + 1]
        m = re.match(rf"^(.*?)(<=|>=|=|<|>)\s*([+-]?\s*{NUM})\s*$", body.strip())
        if not m:
            raise ValueError(f"cannot parse constraint {name}: {body.strip()}")
        lhs, op, rhs = m.groups()
        row = Row(name, senses[op], float(rhs.replace(" ", "")))
        terms, const = parse_expr(model, lhs)
        row.terms = {n: c for n, c in terms.items()}
        row.rhs -= const
        model.rows.append(row)

    inf = math.inf
    for line in buckets["bounds"]:
        s = line.strip()
        m = re.match(rf"^({NAME})\s+free$", s, re.I)
        if m:
            v = model.var(m.group(1))
            v.lb, v.ub = -inf, inf
            continue
        m = re.match(
            rf"^([+-]?{NUM})\s*<=\s*({NAME})\s*<=\s*([+-]?{NUM})$", s)
        if m:
            v = model.var(m.group(2))
            v.lb, v.ub = float(m.group(1)), float(m.group(3))
            continue
        m = re.match(rf"^({NAME})\s*(<=|>=|=)\s*([+-]?(?:{NUM}|inf(?:inity)?))$", s, re.I)
        if m:
            v = model.var(m.group(1))
            raw = m.group(3).lower()
            val = (-inf if raw.startswith("-") else inf) if "inf" in raw else float(raw)
            if m.group(2) == "<=":
                v.ub = val
            elif m.group(2) == ">=":
                v.lb = val
            else:
                v.lb = v.ub = val
            continue
        raise ValueError("cannot parse bound line: " + s)

    for section, integer_only in (("bin", True), ("gen", False)):
        for line in buckets[section]:
            for name in line.split():
                v = model.var(name)
                v.integer = True
                if integer_only:
                    v.lb = max(v.lb, 0.0)
                    v.ub = min(v.ub, 1.0)
    return model


def parse_mps(text):
    model = Model()
    section = None
    objrow = None
    senses = {}
    rows = {}
    int_mode = False
    for raw in text.splitlines():
        if not raw.strip() or raw.lstrip().startswith("*"):
            continue
        if not raw[0].isspace():
            parts = raw.split()
            section = parts[0]
            if section == "NAME" and len(parts) > 1:
                model.name = parts[1]
            continue
        fields = raw.split()
        if section == "ROWS":
            sense, name = fields[0], fields[1]
            if sense == "N":
                if objrow is None:
                    objrow = name
            else:
                if sense not in ("L", "G", "E"):
                    raise ValueError("unknown row sense " + sense)
                row = Row(name, sense, 0.0)
                rows[name] = row
                model.rows.append(row)
        elif section == "COLUMNS":
            if len(fields) >= 3 and fields[1] == "'MARKER'":
                int_mode = "INTORG" in fields[2]
                continue
            v = model.var(fields[0])
            v.integer = v.integer or int_mode
            for rname, val in zip(fields[1::2], fields[2::2]):
                if rname == objrow:
                    v.obj += float(val)
                else:
                    rows[rname].terms[v.name] = rows[rname].terms.get(v.name, 0.0) + float(val)
        elif section == "RHS":
            for rname, val in zip(fields[1::2], fields[2::2]):
                if rname == objrow:
                    model.obj_constant = -float(val)
                else:
                    rows[rname].rhs = float(val)
        elif section == "RANGES":
            raise ValueError("RANGES sections are not supported")
        elif section == "BOUNDS":
            btype, var = fields[0], model.var(fields[2])
            val = float(fields[3]) if len(fields) > 3 else 0.0
            if btype == "UP":
                var.ub = val
            elif btype == "LO":
                var.lb = val
            elif btype == "FX":
                var.lb = var.ub = val
            elif btype == "BV":
                var.integer = True
                var.lb, var.ub = 0.0, 1.0
            elif btype == "MI":
                var.lb = -math.inf
            elif btype == "PL":
                var.ub = math.inf
            else:
                raise ValueError("unsupported bound type " + btype)
        elif section == "ENDATA":
            pass
        else:
            raise ValueError(f"unsupported MPS section {section}")
    return model


def load_model(path):
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    stripped = text.lstrip()
    if stripped.startswith("NAME") or stripped.startswith("*"):
        return parse_mps(text)
    return parse_lp(text)


def g17(v):
    if v == math.inf:
        return "inf"
    if v == -math.inf:
        return "-inf"
    return format(v, ".17g")


def canonical(model):
    lines = []
    for v in sorted(model.vars.values(), key=lambda v: v.name):
        kind = "int" if v.integer else "cont"
        lines.append(f"var {v.name} {kind} [{g17(v.lb)},{g17(v.ub)}]"
                     + (f" obj {g17(v.obj)}" if v.obj != 0.0 else ""))
    if model.obj_constant != 0.0:
        lines.append(f"objconst {g17(model.obj_constant)}")
    for r in sorted(model.rows, key=lambda r: r.name):
        terms = " ".join(f"{n}:{g17(c)}" for n, c in sorted(r.terms.items()) if c != 0.0)
        lines.append(f"row {r.name} {r.sense} {g17(r.rhs)} {terms}".rstrip())
    return "\n".join(lines) + "\n"


def run_solver(model, time_limit, gap):
    import numpy as np
    from scipy.optimize import milp, LinearConstraint, Bounds
    from scipy.sparse import csr_matrix

    order = model.order
    index = {v.name: k for k, v in enumerate(order)}
    n = len(order)
    c = np.array([v.obj for v in order])
    integrality = np.array([1 if v.integer else 0 for v in order])
    bounds = Bounds(np.array([v.lb for v in order]), np.array([v.ub for v in order]))

    constraints = None
    if model.rows:
        data, ri, ci = [], [], []
        lo, hi = [], []
        for k, r in enumerate(model.rows):
            for name, coef in r.terms.items():
                ri.append(k)
                ci.append(index[name])
                data.append(coef)
            lo.append(-math.inf if r.sense == "L" else r.rhs)
            hi.append(math.inf if r.sense == "G" else r.rhs)
        a = csr_matrix((data, (ri, ci)), shape=(len(model.rows), n))
        constraints = LinearConstraint(a, lo, hi)

    options = {"time_limit": time_limit, "mip_rel_gap": gap}
    res = milp(c=c, constraints=constraints, integrality=integrality, bounds=bounds,
               options=options)
    return order, res


def write_solution(path, model, order, res):
    out = ["Model status"]
    if res.status == 0:
        out.append("Optimal")
    elif res.status == 1:
        out.append("Feasible" if res.x is not None else "Time limit reached")
    elif res.status == 2:
        out.append("Infeasible")
    elif res.status == 3:
        out.append("Unbounded")
    else:
        out.append("Not solved")
    out.append("")
    if res.x is not None:
        out.append(f"Objective {g17(res.fun + model.obj_constant)}")
        out.append("")
        out.append(f"# Columns {len(order)}")
        for v, val in zip(order, res.x):
            out.append(f"{v.name} {g17(val)}")
    bound = getattr(res, "mip_dual_bound", None)
    if bound is not None:
        out.append(f"# mip_dual_bound {g17(bound + model.obj_constant)}")
    mip_gap = getattr(res, "mip_gap", None)
    if mip_gap is not None:
        out.append(f"# mip_gap {g17(mip_gap)}")
    text = "\n".join(out) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", required=True, help="LP or MPS file")
    ap.add_argument("--solution", help="output path (stdout when omitted)")
    ap.add_argument("--time-limit", type=float, default=600.0)
    ap.add_argument("--gap", type=float, default=0.0)
    ap.add_argument("--digest", action="store_true",
                    help="emit the canonical matrix and its sha256 instead of solving")
    args = ap.parse_args()

    model = load_model(args.model)
    if args.digest:
        text = canonical(model)
        text += "digest " + hashlib.sha256(text.encode()).hexdigest() + "\n"
        if args.solution:
            with open(args.solution, "w", encoding="utf-8") as f:
                f.write(text)
        else:
            sys.stdout.write(text)
        return 0

    order, res = run_solver(model, args.time_limit, args.gap)
    write_solution(args.solution, model, order, res)
    return 0


if __name__ == "__main__":
    sys.exit(main())
