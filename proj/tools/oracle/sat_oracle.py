#!/usr/bin/env python3
"""Independent SAT check of atlas rules, used to derive the pinned test values.

Reads the atlas file on its own (no code shared with the C++ loader) and encodes
tilings of a torus or a closed window as CNF over per-cell piece states. Needs
python-sat.

    sat_oracle.py torus ATLAS MAX_AREA
    sat_oracle.py alts ATLAS SEED FRONTIER RADIUS
    sat_oracle.py extends ATLAS SEED RADIUS
        SEED is "K,r,x,y;K,r,x,y", FRONTIER is "x,y"
"""
import sys
from pysat.solvers import Cadical153


def rotc(p, r):
    x, y = p
    for _ in range(r % 4):
        x, y = -y, x
    return (x, y)


def rotk(p, r):
    x, y = p
    for _ in range(r % 4):
        x, y = 1 - y, x
    return (x, y)


class Rules:
    def __init__(self, path):
        self.act = {'BLANK': 'BLANK'}
        self.foot = {}
        self.marks = {}
        self.allow = set()
        self.pairs = set()
        self.segments = []
        self.head = None
        sec = None
        for raw in open(path):
            line = raw.split('#')[0].split()
            if not line:
                continue
            if line[0].startswith('['):
                sec = ' '.join(line).strip('[]')
                continue
            if sec == 'decorations' and line[0] == 'orbit':
                ls = line[1:]
                for i, l in enumerate(ls):
                    self.act[l] = ls[(i + 1) % len(ls)]
            elif sec and sec.startswith('tile'):
                k = sec.split()[1][0]
                if line[0] == 'cell':
                    self.foot.setdefault(k, []).append((int(line[1]), int(line[2])))
                elif line[0] == 'mark':
                    self.marks.setdefault(k, {})[(int(line[1]), int(line[2]))] = line[3]
            elif sec == 'corner-rules' and line[0] == 'allow':
                self.allow.add(tuple(line[1:5]))
            elif sec == 'parity':
                if line[0] == 'segment':
                    v = list(map(int, line[1:5]))
                    self.segments.append(((v[0], v[1]), (v[2], v[3])))
                elif line[0] == 'pair':
                    self.pairs.add(tuple(map(int, line[1:5])))
        self.states = [(k, r, j) for k in ('T', 'C') for r in range(4) for j in range(len(self.foot[k]))]
        self.sidx = {s: i for i, s in enumerate(self.states)}

    def act_n(self, l, r):
        for _ in range(r % 4):
            l = self.act[l]
        return l

    def anchor(self, state, cell):
        k, r, j = state
        f = rotc(self.foot[k][j], r)
        return (cell[0] - f[0], cell[1] - f[1])

    def label(self, state, cell, corner):
        k, r, j = state
        a = self.anchor(state, cell)
        p0 = rotk((corner[0] - a[0], corner[1] - a[1]), -r % 4)
        l = self.marks[k].get(p0, 'BLANK')
        return self.act_n(l, r)


class Cnf:
    def __init__(self, rules, cells, canon, optional=()):
        self.R = rules
        self.cells = cells
        self.canon = canon
        self.cid = {c: i for i, c in enumerate(cells)}
        self.nS = len(rules.states)
        self.top = len(cells) * self.nS
        self.cl = []
        # optional cells may stay empty; an empty cell is a wildcard at its corners
        self.empty = {}
        for c in optional:
            self.empty[self.cid[c]] = self.new()
        for i in range(len(cells)):
            lits = [self.var(i, s) for s in range(self.nS)]
            if i in self.empty:
                lits.append(self.empty[i])
            self.cl.append(lits)
            for a in range(self.nS):
                for b in range(a + 1, self.nS):
                    self.cl.append([-lits[a], -lits[b]])

    def var(self, ci, s):
        return ci * self.nS + s + 1

    def new(self):
        self.top += 1
        return self.top

    def at(self, cell):
        c = self.canon(cell)
        return None if c is None else self.cid[c]

    def pieces(self):
        R = self.R
        for c in self.cells:
            ci = self.cid[c]
            for s, (k, r, j) in enumerate(R.states):
                a = R.anchor((k, r, j), c)
                for j2, f in enumerate(R.foot[k]):
                    if j2 == j:
                        continue
                    f = rotc(f, r)
                    o = self.at((a[0] + f[0], a[1] + f[1]))
                    if o is None:
                        self.cl.append([-self.var(ci, s)])
                    else:
                        self.cl.append([-self.var(ci, s), self.var(o, R.sidx[(k, r, j2)])])

    def corner(self, X, Y):
        R = self.R
        quad = [(X, Y), (X - 1, Y), (X - 1, Y - 1), (X, Y - 1)]
        inside = [(q, cell, self.at(cell)) for q, cell in enumerate(quad) if self.at(cell) is not None]
        aux = []
        for t in R.allow:
            a = self.new()
            aux.append(a)
            for q, cell, ci in inside:
                ok = [self.var(ci, s) for s, st in enumerate(R.states) if R.label(st, cell, (X, Y)) == t[q]]
                if ci in self.empty:
                    ok.append(self.empty[ci])
                self.cl.append([-a] + ok)
        self.cl.append(aux)

    def rays(self, limit):
        R = self.R
        for c in self.cells:
            ci = self.cid[c]
            for r in range(4):
                A = self.var(ci, R.sidx[('T', r, 0)])
                for s0, d0 in R.segments:
                    s, d = rotc(s0, r), rotc(d0, r)
                    cc = (c[0] + s[0], c[1] + s[1])
                    live = A
                    for _ in range(limit):
                        k = self.at(cc)
                        if k is None:
                            break
                        for st in R.states:
                            if st[0] != 'T':
                                continue
                            b = R.anchor(st, cc)
                            par = ((b[0] - c[0]) % 2, (b[1] - c[1]) % 2)
                            if (r, st[1]) + par not in R.pairs:
                                self.cl.append([-live, -self.var(k, R.sidx[st])])
                        nxt = self.new()
                        crabs = [self.var(k, R.sidx[('C', q, 0)]) for q in range(4)]
                        for cr in crabs:
                            self.cl.append([-live, -cr, nxt])
                        live = nxt
                        cc = (cc[0] + d[0], cc[1] + d[1])

    def solve(self, assume=()):
        with Cadical153(bootstrap_with=self.cl) as S:
            return S.solve(assumptions=list(assume))


def torus(rules, a, b, c):
    def canon(p):
        q, y0 = divmod(p[1], c)
        return ((p[0] - q * b) % a, y0)
    cells = [(x, y) for x in range(a) for y in range(c)]
    f = Cnf(rules, cells, canon)
    f.pieces()
    for (x, y) in cells:
        f.corner(x + 1, y + 1)
    f.rays(len(cells) + 1)
    return f.solve()


def lattices(max_area):
    for area in range(1, max_area + 1):
        for a in range(1, area + 1):
            if area % a == 0:
                for b in range(a):
                    yield a, b, area // a


def window(rules, x0, y0, x1, y1, rim=0):
    """Cells of [x0,x1)x[y0,y1) must be covered; tiles may reach `rim` cells further."""
    X0, Y0, X1, Y1 = x0 - rim, y0 - rim, x1 + rim, y1 + rim

    def canon(p):
        return p if X0 <= p[0] < X1 and Y0 <= p[1] < Y1 else None
    cells = [(x, y) for x in range(X0, X1) for y in range(Y0, Y1)]
    outer = [c for c in cells if not (x0 <= c[0] < x1 and y0 <= c[1] < y1)]
    f = Cnf(rules, cells, canon, outer)
    x0, y0, x1, y1 = X0, Y0, X1, Y1
    f.pieces()
    for X in range(x0, x1 + 1):
        for Y in range(y0, y1 + 1):
            f.corner(X, Y)
    f.rays(len(cells) + 1)
    return f


def placement_lits(f, pl):
    k, r, x, y = pl
    out = []
    for j, fo in enumerate(f.R.foot[k]):
        fo = rotc(fo, r)
        ci = f.at((x + fo[0], y + fo[1]))
        if ci is None:
            return None
        out.append(f.var(ci, f.R.sidx[(k, r, j)]))
    return out


def alternatives(rules, seed, frontier, radius):
    cells = []
    for k, r, x, y in seed:
        for fo in rules.foot[k]:
            fo = rotc(fo, r)
            cells.append((x + fo[0], y + fo[1]))
    cells.append(frontier)
    x0 = min(c[0] for c in cells) - radius
    y0 = min(c[1] for c in cells) - radius
    x1 = max(c[0] for c in cells) + 1 + radius
    y1 = max(c[1] for c in cells) + 1 + radius
    f = window(rules, x0, y0, x1, y1, rim=1)
    given = [l for pl in seed for l in placement_lits(f, pl)]
    out = []
    for k in ('T', 'C'):
        for r in range(4):
            for fo in rules.foot[k]:
                fo = rotc(fo, r)
                pl = (k, r, frontier[0] - fo[0], frontier[1] - fo[1])
                lits = placement_lits(f, pl)
                if lits is not None and f.solve(given + lits):
                    out.append(pl)
    return sorted(out)


def extends(rules, seed, radius):
    cells = [(x + fo[0], y + fo[1]) for k, r, x, y in seed for fo in (rotc(f, r) for f in rules.foot[k])]
    x0 = min(c[0] for c in cells) - radius
    y0 = min(c[1] for c in cells) - radius
    x1 = max(c[0] for c in cells) + 1 + radius
    y1 = max(c[1] for c in cells) + 1 + radius
    f = window(rules, x0, y0, x1, y1, rim=1)
    lits = [placement_lits(f, pl) for pl in seed]
    if any(l is None for l in lits):
        return False
    return f.solve([l for ls in lits for l in ls])


def main():
    mode, path = sys.argv[1], sys.argv[2]
    rules = Rules(path)
    if mode == 'torus':
        for a, b, c in lattices(int(sys.argv[3])):
            print(a * c, a, b, c, 'SAT' if torus(rules, a, b, c) else 'UNSAT')
    elif mode == 'alts':
        seed = [(s.split(',')[0], *map(int, s.split(',')[1:])) for s in sys.argv[3].split(';') if s]
        fr = tuple(map(int, sys.argv[4].split(',')))
        for pl in alternatives(rules, seed, fr, int(sys.argv[5])):
            print(*pl)
    elif mode == 'extends':
        seed = [(s.split(',')[0], *map(int, s.split(',')[1:])) for s in sys.argv[3].split(';') if s]
        print('SAT' if extends(rules, seed, int(sys.argv[4])) else 'UNSAT')


if __name__ == '__main__':
    main()
