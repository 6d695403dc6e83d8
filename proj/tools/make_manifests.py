#!/usr/bin/env python3
# Regenerates data/manifests/*.json and the manifest fixtures in canonical form.
import cmath
import json
import math
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent

I = [["0", "1"]]          # i
TWO_PI_I = [["0", "0"], ["0", "2"]]


def pi_i(q):              # q * pi * i, q a rational string
    return [["0", "0"], ["0", q]]


def form(degree, terms, dim=3):
    return {"dim": dim, "degree": degree, "terms": terms}


def mono(*exps):
    return list(exps)


RHO = form(2, [
    [[0, 1], [[mono(0, 0, 1), pi_i("-2/3")]]],
    [[0, 2], [[mono(0, 1, 0), pi_i("2/3")]]],
    [[1, 2], [[mono(1, 0, 0), pi_i("-2/3")]]],
])
VOL = form(3, [[[0, 1, 2], [[mono(0, 0, 0), "1"]]]])
MINUS_TWO_PI_I_VOL = form(3, [[[0, 1, 2], [[mono(0, 0, 0), pi_i("-2")]]]])
ZERO2 = form(2, [])


def cplx(z):
    return [z.real, z.imag]


def obj(t, v):
    return {"type": t, "value": v}


def task(name, command, refs=None, params=None):
    t = {"name": name, "command": command}
    if refs:
        t["refs"] = refs
    if params:
        t["params"] = params
    return t


def loop(center, modes, n=256, derivative="spectral"):
    return {"dim": 3, "derivative": derivative,
            "fourier": {"N": n, "center": center,
                        "modes": [{"k": k, "cos": c, "sin": s} for k, c, s in modes]}}


UNIT_CIRCLE = loop([0, 0, 0], [(1, [1, 0, 0], [0, 1, 0])], n=128)
WOBBLY = loop([0.1, 0.2, 0.3], [(1, [0.5, 0, 0.1], [0, 0.5, 0]), (2, [0, 0.1, 0], [0.05, 0, 0.1])])

R3_OBJECTS = {
    "rho": obj("form", RHO),
    "vol": obj("plectic", {"omega": VOL}),
    "H_expected": obj("form", MINUS_TWO_PI_I_VOL),
    "I_rho": obj("gerbe", {"rho": RHO}),
    "sphere": obj("surface", {"icosphere": {"subdivisions": 4, "radius": 1.0}}),
    "alpha": obj("form", form(1, [[[2], [[mono(0, 1, 0), "1"]]], [[0], [[mono(0, 0, 2), "1/2"]]]])),
    "beta": obj("form", form(1, [[[1], [[mono(1, 0, 1), "1"]]], [[2], [[mono(0, 0, 0), "1/3"]]]])),
    "psi": obj("functional", {"exp": {"c": I, "theta": form(1, [[[1], [[mono(1, 0, 0), "1/2"]]]])}}),
    "gamma": obj("loop", WOBBLY),
}
R3_TASKS = [
    task("gerbe is a Deligne cocycle", "validate", {"object": "I_rho"}),
    task("vol is 2-plectic", "validate", {"object": "vol"}),
    task("curvature is -2 pi i vol", "curvature", {"gerbe": "I_rho", "expected": "H_expected", "plectic": "vol"}),
    task("holonomy over the unit sphere", "hol-surface", {"gerbe": "I_rho", "surface": "sphere"},
         {"expected": cplx(cmath.exp(8j * math.pi ** 2 / 3)), "tol": 1e-3}),
    task("KS representation on one instance", "ks-check",
         {"plectic": "vol", "gerbe": "I_rho", "alpha": "alpha", "beta": "beta", "functional": "psi", "loop": "gamma"}),
]


def cover4():
    return {"dim": 3, "patches": ["a", "b", "c", "d"], "nerve": [s for k in (1, 2, 3) for s in all_simplices(k)]}


def all_simplices(k):
    labels = ["a", "b", "c", "d"]
    out = [[]]
    for _ in range(k + 1):
        out = [s + [l] for s in out for l in labels if not s or labels.index(l) > labels.index(s[-1])]
    return out


# g = delta h with h_ab = x0 x1 / 2, A = -dlog h, B = rho everywhere
def twisted_gerbe():
    q = [[mono(1, 1, 0), "1/2"]]
    g = [[s, q if s[:2] == ["a", "b"] else []] for s in all_simplices(2)]
    A_ab = form(1, [[[0], [[mono(0, 1, 0), pi_i("-1")]]], [[1], [[mono(1, 0, 0), pi_i("-1")]]]])
    A = [[s, A_ab if s == ["a", "b"] else form(1, [])] for s in all_simplices(1)]
    B = [[s, RHO] for s in all_simplices(0)]
    return {"cover": "four", "g": g, "A": A, "B": B}


def broken_gerbe():
    g = [[s, [[mono(0, 0, 0), "1/3"]] if s == ["a", "b", "c"] else []] for s in all_simplices(2)]
    A = [[s, form(1, [])] for s in all_simplices(1)]
    B = [[s, ZERO2] for s in all_simplices(0)]
    return {"cover": "four", "g": g, "A": A, "B": B}


def matform(idx, exps, data):
    return {"dim": 3, "degree": 1, "rows": 2, "cols": 2, "terms": [[idx, exps, data]]}


FULL_OBJECTS = dict(R3_OBJECTS)
FULL_OBJECTS.update({
    "four": obj("cover", cover4()),
    "twisted": obj("gerbe", twisted_gerbe()),
    "A_circle": obj("form", form(1, [[[0], [[mono(0, 1, 0), [["0", "-1/2"]]]]],
                                     [[1], [[mono(1, 0, 0), [["0", "1/2"]]]]]])),
    "x_dy": obj("form", form(1, [[[1], [[mono(1, 0, 0), "1"]]]])),
    "dx_dy": obj("form", form(2, [[[0, 1], [[mono(0, 0, 0), "1"]]]])),
    "circle": obj("loop", UNIT_CIRCLE),
    "disc": obj("surface", {"disc": {"rings": 16, "segments": 64, "radius": 1.0}}),
    "brane": obj("morphism", {"source": "I_rho", "target": "I_rho", "rank": 2, "alpha": [],
                              "a": [["M", matform([0], [0, 1, 0], [[0, 1], [0, 0], [0, 0], [0, -1]])]]}),
    "zero1": obj("section", {"n": 1, "omega": [form(1, [])]}),
    "exp1": obj("section", {"n": 1, "omega": [form(1, [[[0], [[mono(0, 0, 0), I]]]])]}),
})
FULL_TASKS = R3_TASKS + [
    task("twisted gerbe is a Deligne cocycle", "validate", {"object": "twisted"}),
    task("D-brane morphism laws", "validate", {"object": "brane"}),
    task("twisted curvature is -2 pi i vol", "curvature", {"gerbe": "twisted", "expected": "H_expected"}),
    task("DD class of I_rho", "dd", {"gerbe": "I_rho"}, {"trivializable": True}),
    task("line holonomy around the unit circle", "hol-line", {"connection": "A_circle", "loop": "circle"},
         {"expected": [-1.0, 0.0], "tol": 1e-8}),
    task("x dy around the unit circle", "transgress", {"form": "x_dy", "loop": "circle"},
         {"expected": [math.pi, 0.0], "tol": 1e-10}),
    task("dx^dy on the position field", "transgress", {"form": "dx_dy", "loop": "circle"},
         {"tangents": ["position"], "expected": [2 * math.pi, 0.0], "tol": 1e-10}),
    task("transgression chain map", "transgress", params={"random": 20, "tol": 1e-5, "eps": 1e-4, "samples": 256}),
    task("D-brane holonomy over the unit disc", "hol-brane", {"rho": "rho", "morphism": "brane", "surface": "disc"},
         {"expected": [-2.0, 0.0], "tol": 1e-3}),
    task("homs between constant sections", "homspace", {"omega": "zero1", "eta": "zero1"}, {"degree": 3, "expected": 1}),
    task("empty exponential sector", "homspace", {"omega": "exp1", "eta": "zero1"}, {"degree": 3, "expected": 0}),
    task("KS representation on random observables", "ks-check", {"plectic": "vol", "gerbe": "I_rho"},
         {"random": 10, "eps": 1e-3, "tol": 1e-3, "samples": 256}),
]

BROKEN = {
    "version": "1",
    "objects": {"four": obj("cover", cover4()), "broken": obj("gerbe", broken_gerbe()),
                "twisted": obj("gerbe", twisted_gerbe()), "rho": obj("form", RHO)},
    "tasks": [
        task("broken cocycle", "validate", {"object": "broken"}),
        task("still runs afterwards", "validate", {"object": "twisted"}),
        task("holonomy on a broken gerbe", "hol-surface", {"gerbe": "broken", "surface": "sphere"}),
    ],
}
BROKEN["objects"]["sphere"] = obj("surface", {"icosphere": {"subdivisions": 1, "radius": 1.0}})

SMALL = {
    "version": "1",
    "objects": {k: FULL_OBJECTS[k] for k in ["rho", "vol", "H_expected", "I_rho", "A_circle", "circle", "zero1", "exp1"]},
    "tasks": [
        task("curvature", "curvature", {"gerbe": "I_rho", "expected": "H_expected", "plectic": "vol"}),
        task("line holonomy", "hol-line", {"connection": "A_circle", "loop": "circle"}, {"expected": [-1.0, 0.0]}),
        task("constants", "homspace", {"omega": "zero1", "eta": "zero1"}, {"degree": 2, "expected": 1}),
        task("wrong expectation", "homspace", {"omega": "exp1", "eta": "zero1"}, {"degree": 2, "expected": 1}),
    ],
}


def write(path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    write(ROOT / "data/manifests/r3-prequantum.json", {"version": "1", "objects": R3_OBJECTS, "tasks": R3_TASKS})
    write(ROOT / "data/manifests/full.json", {"version": "1", "objects": FULL_OBJECTS, "tasks": FULL_TASKS})
    write(ROOT / "tests/fixtures/broken_cocycle.json", BROKEN)
    write(ROOT / "tests/fixtures/small.json", SMALL)
