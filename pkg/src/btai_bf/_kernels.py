"""Compiled planning loop.

Mirrors ``tree._select``, ``tree._expand`` and ``tree._backpropagate`` with
explicit loops. Arrays are the ones owned by :class:`~btai_bf.tree.PlanningTree`
and are modified in place; capacity must already cover ``n_iter`` expansions.
Returns the new node count and the root action with the lowest average cost
(-1 if the root is still a leaf).
"""

import math

import numpy as np

from ._accel import njit


@njit(cache=True)
def plan_iterations(B_by_action, A, log_C, state_entropy, c_explore, n_iter,
                    beliefs, action, cost, visits, parent, first_child, size):
    n_actions, n_states, _ = B_by_action.shape
    n_obs = A.shape[0]
    predicted = np.empty(n_obs)
    for _ in range(n_iter):
        node = 0
        while first_child[node] >= 0:
            first = first_child[node]
            log_n = math.log(visits[node])
            best = first
            best_score = -np.inf
            for k in range(first, first + n_actions):
                score = -cost[k] / visits[k] + c_explore * math.sqrt(log_n / visits[k])
                if score > best_score:
                    best_score = score
                    best = k
            node = best

        first = size
        min_cost = np.inf
        for u in range(n_actions):
            k = first + u
            for s in range(n_states):
                acc = 0.0
                for j in range(n_states):
                    acc += B_by_action[u, s, j] * beliefs[node, j]
                beliefs[k, s] = acc
            risk = 0.0
            amb = 0.0
            for o in range(n_obs):
                acc = 0.0
                for s in range(n_states):
                    acc += A[o, s] * beliefs[k, s]
                predicted[o] = acc
                if acc > 0.0:
                    risk += acc * (math.log(acc) - log_C[o])
            for s in range(n_states):
                amb += beliefs[k, s] * state_entropy[s]
            g = max(risk, 0.0) + amb
            action[k] = u
            cost[k] = g
            visits[k] = 1
            parent[k] = node
            first_child[k] = -1
            if g < min_cost:
                min_cost = g
        first_child[node] = first
        size = first + n_actions

        k = node
        while k >= 0:
            cost[k] += min_cost
            visits[k] += 1
            k = parent[k]

    best_action = -1
    first = first_child[0]
    if first >= 0:
        best_avg = np.inf
        for u in range(n_actions):
            avg = cost[first + u] / visits[first + u]
            if avg < best_avg:
                best_avg = avg
                best_action = u
    return size, best_action
