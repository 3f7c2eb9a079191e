"""Audits of the projection axioms on a :class:`ProjectionData` table.

Every quantifier runs over the data's finite index set.  Comparisons use the
extended order: ``inf > theta`` is true and ``inf == inf`` is true.  Cells that
are undefined (an empty projection) are excluded and counted.
"""

from __future__ import annotations

import numpy as np

from .errors import PreconditionError
from .projection import ProjectionData, _ext
from .reports import FAIL, Report, combine


def _gt(D, theta):
    with np.errstate(invalid="ignore"):
        return np.nan_to_num(D, nan=-1.0) > theta


def _stamp(rep: Report, data: ProjectionData, theta) -> Report:
    rep.window = data.window
    rep.stats.setdefault("theta", theta)
    rep.stats.setdefault("apices", len(data))
    return rep


def check_P1(data: ProjectionData, theta=None) -> Report:
    theta = data.theta if theta is None else theta
    rep = _stamp(Report("P1"), data, theta)
    n = len(data)
    ar = np.arange(n)
    diag = data.D[:, ar, ar]
    for yi, xi in np.argwhere(_gt(diag, theta)):
        Y, X = data.apices[yi], data.apices[xi]
        rep.fail({"Y": data.label(Y), "X": data.label(X), "diam": _ext(diag[yi, xi])})
    rep.stats["max_diameter"] = _ext(np.nanmax(diag)) if n > 1 and not np.isnan(diag).all() else 0
    rep.stats["empty_projections"] = len(data.empty_pairs())
    return rep.finish()


def check_P2(data: ProjectionData, theta=None) -> Report:
    """Behrstock inequality: ``d_Y(X,Z) > theta`` implies ``d_X(Y,Z) <= theta``."""
    theta = data.theta if theta is None else theta
    rep = _stamp(Report("P2"), data, theta)
    D = data.D
    n = len(data)
    big = _gt(D, theta)                      # big[Y, X, Z]
    other = D.transpose(1, 0, 2)             # other[Y, X, Z] = d_X(Y, Z)
    undefined = np.isnan(other) & big
    bad = big & _gt(other, theta)
    idx = np.arange(n)
    bad[:, idx, idx] = False                 # X == Z
    undefined[:, idx, idx] = False
    for yi, xi, zi in np.argwhere(bad):
        rep.fail({"Y": data.label(data.apices[yi]), "X": data.label(data.apices[xi]),
                  "Z": data.label(data.apices[zi]),
                  "d_Y(X,Z)": _ext(D[yi, xi, zi]), "d_X(Y,Z)": _ext(D[xi, yi, zi])})
    rep.stats["antecedent_true"] = int(big.sum())
    rep.stats["undefined_consequent"] = int(undefined.sum())
    return rep.finish()


def check_P2plus(data: ProjectionData, theta=None) -> Report:
    """``d_X(Y,Z) > theta`` implies ``d_Y(Z,W) == d_Y(X,W)`` for distinct X,Y,Z,W."""
    theta = data.theta if theta is None else theta
    rep = _stamp(Report("P2+"), data, theta)
    D = data.D
    n = len(data)
    big = _gt(D, theta)                      # big[X, Y, Z]
    idx = np.arange(n)
    antecedents = 0
    for yi in range(n):
        ante = big[:, yi, :].copy()          # ante[X, Z]
        ante[idx, idx] = False
        ante[yi, :] = False
        ante[:, yi] = False
        if not ante.any():
            continue
        antecedents += int(ante.sum())
        DY = D[yi]                           # DY[A, W] = d_Y(A, W)
        a = DY[None, :, :]                   # d_Y(Z, W) at [X, Z, W]
        b = DY[:, None, :]                   # d_Y(X, W) at [X, Z, W]
        differ = ~((a == b) | (np.isnan(a) & np.isnan(b)))
        differ &= ante[:, :, None]
        differ[:, :, yi] = False
        differ[idx, :, idx] = False          # W == X
        differ[:, idx, idx] = False          # W == Z
        for xi, zi, wi in np.argwhere(differ):
            rep.fail({
                "X": data.label(data.apices[xi]), "Y": data.label(data.apices[yi]),
                "Z": data.label(data.apices[zi]), "W": data.label(data.apices[wi]),
                "d_X(Y,Z)": _ext(D[xi, yi, zi]),
                "d_Y(Z,W)": _ext(DY[zi, wi]), "d_Y(X,W)": _ext(DY[xi, wi]),
            })
    rep.stats["antecedent_true"] = antecedents
    return rep.finish()


def large_projection_set(data: ProjectionData, X, Z, theta) -> list:
    """``{Y != X, Z : d_Y(X, Z) > theta}`` within the index set."""
    xi, zi = data.i(X), data.i(Z)
    col = _gt(data.D[:, xi, zi], theta)
    col[[xi, zi]] = False
    return [data.apices[i] for i in np.flatnonzero(col)]


def check_P3(data: ProjectionData, pair_window=None, theta=None) -> Report:
    """Finite mediator sets, each member within ``R + 2 delta_op`` of a chosen geodesic."""
    theta = data.theta if theta is None else theta
    rep = _stamp(Report("P3"), data, theta)
    space = data.space
    radius = data.R + 2 * data.delta_op
    if pair_window is None:
        pair_window = [(X, Z) for i, X in enumerate(data.apices) for Z in data.apices[i + 1:]]
    largest = 0
    rejected = 0
    for X, Z in pair_window:
        if X == Z:
            rejected += 1
            rep.notes.append(f"degenerate pair {data.label(X)} rejected")
            continue
        members = large_projection_set(data, X, Z, theta)
        largest = max(largest, len(members))
        if not members or space is None:
            continue
        try:
            path = space.geodesic(X, Z)
        except Exception:  # different components: nothing to localize against
            continue
        ids = [space.idx(u) for u in path]
        for Y in members:
            r = space.row(Y)[ids]
            r = r[r >= 0]
            dist = int(r.min()) if r.size else None
            if dist is None or dist > radius:
                rep.fail({"X": data.label(X), "Z": data.label(Z), "Y": data.label(Y),
                          "distance_to_geodesic": dist, "radius": radius})
    rep.stats.update(pairs=len(pair_window), max_mediators=largest, rejected=rejected)
    if space is None:
        rep.notes.append("no underlying space: localization not checked, finiteness only")
    return rep.finish()


def check_all(data: ProjectionData, strong: bool = True, pair_window=None) -> list:
    reps = [check_P1(data), check_P2(data)]
    if strong:
        reps.append(check_P2plus(data))
    reps.append(check_P3(data, pair_window))
    return reps


def verify_upgrade_contract(data: ProjectionData, data_prime: ProjectionData) -> Report:
    """``data_prime`` is a valid strong upgrade of ``data`` at ``theta' = 11 theta``."""
    if [data.label(a) for a in data.apices] != [data_prime.label(a) for a in data_prime.apices]:
        raise PreconditionError("upgrade contract needs identical index sets")
    theta = data.theta
    theta_p = 11 * theta
    rep = Report("upgrade contract", window=data.window, stats={"theta": theta, "theta_prime": theta_p})
    subs = [check_P1(data_prime, theta_p), check_P2plus(data_prime, theta_p),
            check_P3(data_prime, theta=theta_p)]
    for s in subs:
        if s.verdict == FAIL:
            rep.fail({"axiom": s.check, "witness": s.witnesses[0] if s.witnesses else None})
    A, B = data.D, data_prime.D
    both_nan = np.isnan(A) & np.isnan(B)
    both_inf = np.isinf(A) & np.isinf(B)
    with np.errstate(invalid="ignore"):
        diff = np.abs(A - B)
    diff[both_nan | both_inf] = 0.0
    diff[np.isnan(diff)] = np.inf  # one side undefined
    slack = float(diff.max()) if diff.size else 0.0
    rep.stats["slack"] = _ext(slack)
    for yi, xi, zi in np.argwhere(diff > 2 * theta):
        rep.fail({"Y": data.label(data.apices[yi]), "X": data.label(data.apices[xi]),
                  "Z": data.label(data.apices[zi]), "d": _ext(A[yi, xi, zi]),
                  "d_prime": _ext(B[yi, xi, zi])})
    rep.stats["combined"] = combine(subs)
    return rep.finish()


def replay(data: ProjectionData, witness: dict) -> dict:
    """Recompute every ``d_*(.,.)`` value named in an axiom witness."""
    parse = data.space.parse if data.space is not None else (lambda s: s)
    out = {}
    for key in witness:
        if key.startswith("d_") and "(" in key:
            p = key[2:key.index("(")]
            a, b = key[key.index("(") + 1:-1].split(",")
            out[key] = data.dist(parse(witness[p]), parse(witness[a]), parse(witness[b]))
    return out
