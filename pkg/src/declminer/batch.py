"""Vectorized evaluation of every candidate of a template at once.

The log is flattened into integer arrays (activity code, resource code,
trace number per event, events of one trace contiguous and in order). For
each event and each activity we precompute the next and previous
occurrence inside the same trace; every template then reduces to a boolean
``(n_events, n_activities)`` fulfilment matrix that is summed per
activation activity with a matrix product.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from functools import cached_property

import numpy as np

from .engine import ConstraintCandidate, ConstraintMetrics, generate_candidates
from .event_log import EventLog
from .org_model import ROLE, OrgModel
from .templates import ParamBinding, TemplateId

__all__ = ["LogArrays", "evaluate_all"]

T = TemplateId


def _count(onehot: np.ndarray, mat: np.ndarray) -> np.ndarray:
    """``onehot.T @ mat`` as exact int64 (float BLAS is exact below 2**53)."""
    return np.rint(onehot.T.astype(np.float64) @ mat.astype(np.float64)).astype(np.int64)


class LogArrays:
    """Integer encoding of a log plus lazily derived occurrence tables."""

    def __init__(self, log: EventLog, org: OrgModel):
        self.n_traces = len(log)
        self.alphabet = log.alphabet
        self.identities = log.identities
        self.groups = org.groups(ROLE)
        act_code = {a: i for i, a in enumerate(self.alphabet)}
        res_code = {r: i for i, r in enumerate(self.identities)}
        acts, ress, trs = [], [], []
        for t_no, trace in enumerate(log):
            for ev in trace.events:
                acts.append(act_code[ev.activity])
                ress.append(res_code[ev.resource])
                trs.append(t_no)
        self.act = np.asarray(acts, dtype=np.int64)
        self.res = np.asarray(ress, dtype=np.int64)
        self.trace = np.asarray(trs, dtype=np.int64)
        self.n = len(self.act)
        self.K = len(self.alphabet)
        self.R = len(self.identities)
        self.G = len(self.groups)

        grp_code = {g: i for i, g in enumerate(self.groups)}
        member = np.zeros((self.R, self.G), dtype=bool)
        for r, ident in enumerate(self.identities):
            for g in org.groups_of(ident, ROLE):
                member[r, grp_code[g]] = True
        self.member = member

    @cached_property
    def onehot(self) -> np.ndarray:
        E = np.zeros((self.n, self.K), dtype=bool)
        E[np.arange(self.n), self.act] = True
        return E

    @cached_property
    def act_count(self) -> np.ndarray:
        return np.bincount(self.act, minlength=self.K)

    @cached_property
    def present(self) -> np.ndarray:
        """(n_traces, K): activity occurs in trace."""
        P = np.zeros((self.n_traces, self.K), dtype=bool)
        P[self.trace, self.act] = True
        return P

    @cached_property
    def trace_count(self) -> np.ndarray:
        return self.present.sum(axis=0)

    @cached_property
    def _neighbours(self) -> tuple[np.ndarray, np.ndarray]:
        """Next / previous same-trace occurrence of each activity, per event.

        Missing next is ``n`` and missing previous is ``-1``.
        """
        idx = np.arange(self.n)
        nxt = np.full((self.n, self.K), self.n, dtype=np.int64)
        prv = np.full((self.n, self.K), -1, dtype=np.int64)
        for k in range(self.K):
            pos = np.flatnonzero(self.act == k)
            if not len(pos):
                continue
            i = np.searchsorted(pos, idx, side="right")
            ok = i < len(pos)
            cand = pos[np.minimum(i, len(pos) - 1)]
            ok &= self.trace[cand] == self.trace
            nxt[ok, k] = cand[ok]
            j = np.searchsorted(pos, idx, side="left") - 1
            ok = j >= 0
            cand = pos[np.maximum(j, 0)]
            ok &= self.trace[cand] == self.trace
            prv[ok, k] = cand[ok]
        return nxt, prv

    @property
    def next_occ(self) -> np.ndarray:
        return self._neighbours[0]

    @property
    def prev_occ(self) -> np.ndarray:
        return self._neighbours[1]

    @cached_property
    def f_response(self) -> np.ndarray:
        return self.next_occ < self.n

    @cached_property
    def f_precedence(self) -> np.ndarray:
        return self.prev_occ >= 0

    @cached_property
    def _successor(self) -> np.ndarray:
        """(n, K): the next event in the trace has activity k."""
        S = np.zeros((self.n, self.K), dtype=bool)
        if self.n > 1:
            same = self.trace[1:] == self.trace[:-1]
            rows = np.flatnonzero(same)
            S[rows, self.act[rows + 1]] = True
        return S

    @cached_property
    def _predecessor(self) -> np.ndarray:
        S = np.zeros((self.n, self.K), dtype=bool)
        if self.n > 1:
            same = self.trace[1:] == self.trace[:-1]
            rows = np.flatnonzero(same) + 1
            S[rows, self.act[rows - 1]] = True
        return S

    @cached_property
    def trace_res(self) -> np.ndarray:
        """(n_traces, K, R): resource r performed activity k in the trace."""
        M = np.zeros((self.n_traces, self.K, self.R), dtype=bool)
        M[self.trace, self.act, self.res] = True
        return M

    @cached_property
    def memberships(self) -> tuple[np.ndarray, np.ndarray]:
        """(event index, group index) for every role membership of an event's resource."""
        ev, grp = np.nonzero(self.member[self.res])
        return ev, grp

    @cached_property
    def role_onehot(self) -> np.ndarray:
        """(n_memberships, K*G) one-hot of activity and group."""
        ev, grp = self.memberships
        H = np.zeros((len(ev), self.K * self.G), dtype=bool)
        H[np.arange(len(ev)), self.act[ev] * self.G + grp] = True
        return H

    @cached_property
    def role_act_count(self) -> np.ndarray:
        """(K, G): events of activity k by a member of group g."""
        ev, grp = self.memberships
        flat = np.bincount(self.act[ev] * self.G + grp, minlength=self.K * self.G)
        return flat.reshape(self.K, self.G)

    @cached_property
    def role_trace_count(self) -> np.ndarray:
        """(K, G): traces with an activity-k event by a member of group g."""
        ev, grp = self.memberships
        key = (self.trace[ev] * self.K + self.act[ev]) * self.G + grp
        key = np.unique(key)
        flat = np.bincount(key % (self.K * self.G), minlength=self.K * self.G)
        return flat.reshape(self.K, self.G)


def _pair_matrices(L: LogArrays, t: TemplateId):
    """(activations, fulfilments, condition traces) as (K, K) arrays indexed [a, b]."""
    E = L.onehot
    K = L.K
    if t in (T.RESPONSE, T.ALTERNATE_RESPONSE, T.CHAIN_RESPONSE,
             T.RESPONDED_EXISTENCE, T.NOT_SUCCESSION):
        acts = np.repeat(L.act_count[:, None], K, axis=1)
        cond = np.repeat(L.trace_count[:, None], K, axis=1)
        if t is T.RESPONSE:
            F = L.f_response
        elif t is T.NOT_SUCCESSION:
            F = ~L.f_response
        elif t is T.ALTERNATE_RESPONSE:
            own_next = L.next_occ[np.arange(L.n), L.act]
            F = L.f_response & (L.next_occ < own_next[:, None])
        elif t is T.CHAIN_RESPONSE:
            F = L._successor
        else:
            F = L.present[L.trace]
        return acts, _count(E, F), cond

    if t in (T.PRECEDENCE, T.ALTERNATE_PRECEDENCE, T.CHAIN_PRECEDENCE):
        acts = np.repeat(L.act_count[None, :], K, axis=0)
        cond = np.repeat(L.trace_count[None, :], K, axis=0)
        if t is T.PRECEDENCE:
            F = L.f_precedence
        elif t is T.ALTERNATE_PRECEDENCE:
            own_prev = L.prev_occ[np.arange(L.n), L.act]
            F = L.f_precedence & (L.prev_occ > own_prev[:, None])
        else:
            F = L._predecessor
        # rows of the product are the activating b, columns the required a
        return acts, _count(E, F).T, cond

    if t in (T.BINDING_OF_DUTIES, T.SEPARATION_OF_DUTIES):
        P = L.present
        in_trace = P[L.trace]
        acts = _count(E, in_trace)
        cond = _count(P, P)
        # (n, K): resource of the event performed b in the same trace
        by_same = L.trace_res[L.trace, :, L.res]
        if t is T.BINDING_OF_DUTIES:
            n_res = L.trace_res.sum(axis=2)[L.trace]
            F = in_trace & by_same & (n_res == 1)
        else:
            F = in_trace & ~by_same
        return acts, _count(E, F), cond
    raise ValueError(t)


def _evaluate_template(L: LogArrays, t: TemplateId) -> dict[ParamBinding, tuple[int, int, int]]:
    """Counts for every binding of ``t`` over the log's own symbols."""
    out: dict[ParamBinding, tuple[int, int, int]] = {}
    A, R_, G = L.alphabet, L.identities, L.groups
    if t is T.DIRECT_ALLOCATION:
        ful = np.bincount(L.act * L.R + L.res, minlength=L.K * L.R).reshape(L.K, L.R)
        for a in range(L.K):
            for r in range(L.R):
                out[ParamBinding(task_a=A[a], identity=R_[r])] = (
                    int(L.act_count[a]), int(ful[a, r]), int(L.trace_count[a]))
        return out
    if t is T.ROLE_BASED_ALLOCATION:
        ful = L.role_act_count
        for a in range(L.K):
            for g in range(L.G):
                out[ParamBinding(task_a=A[a], group=G[g])] = (
                    int(L.act_count[a]), int(ful[a, g]), int(L.trace_count[a]))
        return out
    if t in (T.ROLE_BASED_RESPONSE, T.ROLE_BASED_PRECEDENCE):
        ev, _ = L.memberships
        base = L.f_response if t is T.ROLE_BASED_RESPONSE else L.f_precedence
        # (K*G, K) -> [activating activity, group, other activity]
        ful = _count(L.role_onehot, base[ev]).reshape(L.K, L.G, L.K)
        acts, cond = L.role_act_count, L.role_trace_count
        for x in range(L.K):
            for y in range(L.K):
                if x == y:
                    continue
                for g in range(L.G):
                    if t is T.ROLE_BASED_RESPONSE:
                        bd = ParamBinding(task_a=A[x], task_b=A[y], group=G[g])
                    else:
                        bd = ParamBinding(task_a=A[y], task_b=A[x], group=G[g])
                    out[bd] = (int(acts[x, g]), int(ful[x, g, y]), int(cond[x, g]))
        return out

    acts, ful, cond = _pair_matrices(L, t)
    for a in range(L.K):
        for b in range(L.K):
            if a != b:
                out[ParamBinding(task_a=A[a], task_b=A[b])] = (
                    int(acts[a, b]), int(ful[a, b]), int(cond[a, b]))
    return out


def _warm(L: LogArrays, templates: Sequence[TemplateId]) -> None:
    """Build the shared tables up front so worker threads only read them."""
    L.onehot, L.act_count, L.present, L.trace_count
    L._neighbours, L.f_response, L.f_precedence, L._successor, L._predecessor
    if any(t in (T.BINDING_OF_DUTIES, T.SEPARATION_OF_DUTIES) for t in templates):
        L.trace_res
    if any(t.needs_org for t in templates):
        L.memberships, L.role_onehot, L.role_act_count, L.role_trace_count


def evaluate_all(
    log: EventLog,
    org: OrgModel | None,
    templates: Iterable[TemplateId],
    *,
    jobs: int = 1,
) -> list[tuple[ConstraintCandidate, ConstraintMetrics]]:
    """Metrics for every candidate of ``templates``, in candidate sort order.

    ``jobs > 1`` evaluates templates on a thread pool; the result is the
    same list either way.
    """
    org = org if org is not None else OrgModel()
    templates = sorted({T(t) for t in templates}, key=lambda t: t.order)
    candidates = generate_candidates(log.alphabet, log.identities, org, templates)
    if not candidates:
        return []
    L = LogArrays(log, org)
    _warm(L, templates)
    if jobs > 1 and len(templates) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            tables = list(pool.map(lambda t: _evaluate_template(L, t), templates))
    else:
        tables = [_evaluate_template(L, t) for t in templates]
    by_template = dict(zip(templates, tables))
    out = []
    for cand in candidates:
        a, f, c = by_template[cand.template][cand.binding]
        out.append((cand, ConstraintMetrics(a, f, c, L.n_traces)))
    return out
