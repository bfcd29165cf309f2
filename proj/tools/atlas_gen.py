#!/usr/bin/env python3
"""Regenerate data/trilobite_crab.atlas from the substitution templates below.

Corner labels carry (tile, rotation, lattice point), so an allowed corner tuple is
exactly a 2x2 window of tile pieces. The allowed set is every window that occurs
in deep inflations of either tile, closed under quarter turns. The parity table is
built the same way from the head segments.
"""
import sys

SCALE = 3
# (kind, rotation, anchor x, anchor y), rotation-0 supertile with anchor (0,0).
TRILOBITE_TEMPLATE = [
    ('T', 0, 3, 3), ('T', 3, 1, 5), ('T', 0, 1, 1), ('T', 1, 5, 1),
    ('C', 2, 0, 0), ('C', 2, 0, 1), ('C', 1, 0, 2), ('C', 1, 0, 3), ('C', 2, 0, 4),
    ('C', 1, 0, 5), ('C', 2, 1, 0), ('C', 1, 1, 3), ('C', 3, 2, 0), ('C', 2, 2, 3),
    ('C', 2, 3, 0), ('C', 2, 3, 1), ('C', 2, 3, 2), ('C', 0, 3, 5), ('C', 2, 4, 0),
    ('C', 0, 4, 5), ('C', 3, 5, 0), ('C', 0, 5, 3), ('C', 0, 5, 4), ('C', 0, 5, 5),
]
CORE = (3, 3)
CRAB_TEMPLATE = [
    ('T', 0, 1, 1), ('C', 2, 0, 0), ('C', 2, 0, 1), ('C', 1, 0, 2), ('C', 2, 1, 0),
    ('C', 3, 2, 0),
]
TFOOT = [(0, 0), (1, 0), (0, 1), (1, 1)]
# Rotation-0 tips as (corner, contact cell), in neighbor-code letter order.
TIPS = [((0, 2), (-1, 2)), ((0, 0), (-1, -1)), ((2, 0), (2, -1))]
HEAD = (2, 2)
SEGMENTS = [((2, 2), (1, 1))]
LEVELS = 5


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


def add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def footprint(kind):
    return TFOOT if kind == 'T' else [(0, 0)]


def inflate1(pl):
    kind, r, a = pl
    body = TRILOBITE_TEMPLATE if kind == 'T' else CRAB_TEMPLATE
    m = (SCALE // 2, SCALE // 2)
    d = add(sub(m, rotc(m, r)), (SCALE * a[0], SCALE * a[1]))
    return [(k, (r2 + r) % 4, add(rotc((x, y), r), d)) for (k, r2, x, y) in body]


def inflate(pls, n):
    for _ in range(n):
        pls = [q for p in pls for q in inflate1(p)]
    return pls


def grid_of(pls):
    g = {}
    for i, (k, r, a) in enumerate(pls):
        for f in footprint(k):
            c = add(rotc(f, r), a)
            assert c not in g, c
            g[c] = (i, f)
    return g


def label(kind, point0, r):
    return '%s%d%d%s' % ('t' if kind == 'T' else 'c', point0[0], point0[1], 'abcd'[r])


def corner_label(pls, g, corner, cell):
    i, f = g[cell]
    k, r, a = pls[i]
    off = sub(corner, a)
    return label(k, rotk(off, -r % 4), r)


def windows(pls, g):
    out = set()
    for (x, y) in g:
        X, Y = x + 1, y + 1
        quad = [(X, Y), (X - 1, Y), (X - 1, Y - 1), (X, Y - 1)]
        if all(c in g for c in quad):
            out.add(tuple(corner_label(pls, g, (X, Y), c) for c in quad))
    return out


def rotate_label(l, r):
    return l[:-1] + 'abcd'[('abcd'.index(l[-1]) + r) % 4]


def rotclose(tuples):
    out = set()
    for t in tuples:
        w = list(t)
        for _ in range(4):
            out.add(tuple(w))
            w = [rotate_label(l, 1) for l in [w[3], w[0], w[1], w[2]]]
    return out


def head_pairs(pls, g):
    out = set()
    for p in pls:
        k, r, a = p
        if k != 'T':
            continue
        for s, d in SEGMENTS:
            c, step = add(rotc(s, r), a), rotc(d, r)
            while c in g:
                q = pls[g[c][0]]
                if q[0] == 'T':
                    diff = sub(q[2], a)
                    out.add((r, q[1], diff[0] % 2, diff[1] % 2))
                    break
                c = add(c, step)
    return out


def parity_close(pairs):
    out = set()
    for (a, b, px, py) in pairs:
        for r in range(4):
            q = (px, py) if r % 2 == 0 else (py, px)
            out.add(((a + r) % 4, (b + r) % 4) + q)
            out.add(((b + r) % 4, (a + r) % 4) + q)
    return out


def main(path):
    W, P = set(), set()
    for seed in ('T', 'C'):
        pls = inflate([(seed, 0, (0, 0))], LEVELS)
        g = grid_of(pls)
        W |= windows(pls, g)
        P |= head_pairs(pls, g)
    W, P = rotclose(W), parity_close(P)
    lines = []
    out = lines.append
    out('# Trilobite and crab on the square grid.')
    out('# Regenerate with tools/atlas_gen.py; see README for the label scheme.')
    out('')
    out('[decorations]')
    out('orbit BLANK')
    for kind, n in (('T', 3), ('C', 2)):
        for x in range(n):
            for y in range(n):
                out('orbit ' + ' '.join(label(kind, (x, y), r) for r in range(4)))
    out('')
    out('[tile TRILOBITE]')
    for f in TFOOT:
        out('cell %d %d' % f)
    for x in range(3):
        for y in range(3):
            out('mark %d %d %s' % (x, y, label('T', (x, y), 0)))
    for corner, contact in TIPS:
        out('tip %d %d %d %d' % (corner + contact))
    out('head %d %d' % HEAD)
    out('')
    out('[tile CRAB]')
    out('cell 0 0')
    for x in range(2):
        for y in range(2):
            out('mark %d %d %s' % (x, y, label('C', (x, y), 0)))
    out('')
    out('[corner-rules]')
    out('# NE NW SW SE')
    for t in sorted(W):
        out('allow ' + ' '.join(t))
    out('')
    out('[parity]')
    for s, d in SEGMENTS:
        out('segment %d %d %d %d' % (s + d))
    for p in sorted(P):
        out('pair %d %d %d %d' % p)
    out('')
    out('[supertile]')
    out('scale %d' % SCALE)
    out('template TRILOBITE')
    for k, r, x, y in TRILOBITE_TEMPLATE:
        out('place %s %d %d %d' % ('TRILOBITE' if k == 'T' else 'CRAB', r, x, y))
    out('core %d %d' % CORE)
    out('template CRAB')
    for k, r, x, y in CRAB_TEMPLATE:
        out('place %s %d %d %d' % ('TRILOBITE' if k == 'T' else 'CRAB', r, x, y))
    with open(path, 'w') as fh:
        fh.write('\n'.join(lines) + '\n')
    print('%d corner tuples, %d parity pairs' % (len(W), len(P)))


if __name__ == '__main__':
    main(sys.argv[1] if len(sys.argv) > 1 else 'data/trilobite_crab.atlas')
