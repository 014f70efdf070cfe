"""Expandable planning tree over future hidden states.

Nodes live in a :class:`PlanningTree`, a struct-of-arrays store that the
compiled kernels can mutate in place. :class:`TreeNode` is a lightweight view
of one slot. Children of a node are always created together, one per action,
in consecutive slots, so a node only records the index of its first child.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .categorical import as_categorical, column_entropy, xlogx
from .errors import ContractViolationError, PlanningError

ROOT_ACTION = -1
NO_CHILD = -1


@dataclass(frozen=True)
class PlannerConfig:
    exploration_constant: float = 2.0
    planning_iterations: int = 25

    def __post_init__(self):
        if not (self.exploration_constant >= 0 and math.isfinite(self.exploration_constant)):
            raise ContractViolationError(
                f"exploration_constant must be a finite nonnegative number, got {self.exploration_constant!r}"
            )
        if int(self.planning_iterations) != self.planning_iterations or self.planning_iterations < 1:
            raise ContractViolationError(
                f"planning_iterations must be a positive integer, got {self.planning_iterations!r}"
            )


class PlanningTree:
    """Storage for every node of one planning tree.

    ``beliefs[i]`` is the state distribution of node ``i``, ``cost[i]`` its
    aggregated expected free energy and ``visits[i]`` its visit count. Slot 0
    is always the root.
    """

    def __init__(self, root_beliefs, n_actions: int, capacity: int = 1, root_action: int = ROOT_ACTION):
        root_beliefs = as_categorical(root_beliefs, "root beliefs")
        if n_actions < 1:
            raise ContractViolationError("a tree needs at least one action")
        self.n_actions = int(n_actions)
        capacity = max(int(capacity), 1)
        n_states = root_beliefs.size
        self.beliefs = np.zeros((capacity, n_states))
        self.action = np.full(capacity, ROOT_ACTION, dtype=np.int64)
        self.cost = np.zeros(capacity)
        self.visits = np.zeros(capacity, dtype=np.int64)
        self.parent = np.full(capacity, NO_CHILD, dtype=np.int64)
        self.first_child = np.full(capacity, NO_CHILD, dtype=np.int64)
        self.beliefs[0] = root_beliefs
        self.action[0] = root_action
        self.visits[0] = 1
        self.size = 1

    @property
    def n_states(self) -> int:
        return self.beliefs.shape[1]

    @property
    def capacity(self) -> int:
        return self.beliefs.shape[0]

    @property
    def root(self) -> TreeNode:
        return TreeNode(self, 0)

    def __len__(self) -> int:
        return self.size

    def reserve(self, capacity: int) -> None:
        """Grow the backing arrays to hold at least ``capacity`` nodes."""
        if capacity <= self.capacity:
            return
        capacity = max(capacity, 2 * self.capacity)
        grow = capacity - self.capacity
        self.beliefs = np.concatenate([self.beliefs, np.zeros((grow, self.n_states))])
        self.action = np.concatenate([self.action, np.full(grow, ROOT_ACTION, dtype=np.int64)])
        self.cost = np.concatenate([self.cost, np.zeros(grow)])
        self.visits = np.concatenate([self.visits, np.zeros(grow, dtype=np.int64)])
        self.parent = np.concatenate([self.parent, np.full(grow, NO_CHILD, dtype=np.int64)])
        self.first_child = np.concatenate([self.first_child, np.full(grow, NO_CHILD, dtype=np.int64)])

    def nodes(self) -> Iterator[TreeNode]:
        """All nodes in creation order (root first)."""
        for i in range(self.size):
            yield TreeNode(self, i)


class TreeNode:
    """View of one node inside a :class:`PlanningTree`."""

    __slots__ = ("tree", "index")

    def __init__(self, tree: PlanningTree, index: int):
        self.tree = tree
        self.index = int(index)

    def __eq__(self, other):
        return isinstance(other, TreeNode) and other.tree is self.tree and other.index == self.index

    def __hash__(self):
        return hash((id(self.tree), self.index))

    def __repr__(self):
        return (
            f"TreeNode(index={self.index}, action={self.action}, visits={self.visits}, "
            f"cost_aggregate={self.cost_aggregate:.6g})"
        )

    @property
    def beliefs(self) -> np.ndarray:
        return self.tree.beliefs[self.index]

    @property
    def action(self) -> int:
        return int(self.tree.action[self.index])

    @property
    def cost_aggregate(self) -> float:
        return float(self.tree.cost[self.index])

    @property
    def visits(self) -> int:
        return int(self.tree.visits[self.index])

    @property
    def parent(self) -> TreeNode | None:
        p = self.tree.parent[self.index]
        return None if p == NO_CHILD else TreeNode(self.tree, p)

    @property
    def children(self) -> list[TreeNode]:
        first = self.tree.first_child[self.index]
        if first == NO_CHILD:
            return []
        return [TreeNode(self.tree, first + u) for u in range(self.tree.n_actions)]

    @property
    def is_leaf(self) -> bool:
        return self.tree.first_child[self.index] == NO_CHILD

    def ancestors(self) -> list[TreeNode]:
        """Ancestors from the parent up to the root."""
        out = []
        node = self.parent
        while node is not None:
            out.append(node)
            node = node.parent
        return out

    def path_actions(self) -> list[int]:
        """Actions leading from the root to this node."""
        actions = []
        node = self
        while node.parent is not None:
            actions.append(node.action)
            node = node.parent
        return actions[::-1]


def uct_score(avg_cost: float, parent_visits: int, child_visits: int, c_explore: float) -> float:
    return -avg_cost + c_explore * math.sqrt(math.log(parent_visits) / child_visits)


def average_cost(node: TreeNode) -> float:
    return node.cost_aggregate / node.visits


# numpy planning path ---------------------------------------------------------


def _select(tree: PlanningTree, c_explore: float, start: int = 0) -> int:
    node = start
    n_actions = tree.n_actions
    while tree.first_child[node] != NO_CHILD:
        first = tree.first_child[node]
        kids = slice(first, first + n_actions)
        visits = tree.visits[kids]
        scores = -tree.cost[kids] / visits + c_explore * np.sqrt(math.log(tree.visits[node]) / visits)
        # argmax returns the first maximum: ties go to the lowest action
        node = first + int(np.argmax(scores))
    return node


def _child_costs(child_beliefs: np.ndarray, A: np.ndarray, log_C: np.ndarray, state_entropy: np.ndarray) -> np.ndarray:
    """Expected free energy of each row of ``child_beliefs``."""
    predicted_obs = child_beliefs @ A.T
    risk = xlogx(predicted_obs).sum(axis=1) - predicted_obs @ log_C
    return np.maximum(risk, 0.0) + child_beliefs @ state_entropy


def _expand(tree: PlanningTree, node: int, B_by_action: np.ndarray, A: np.ndarray, log_C: np.ndarray,
            state_entropy: np.ndarray) -> int:
    if tree.first_child[node] != NO_CHILD:
        raise ContractViolationError(f"node {node} is already expanded")
    n_actions = tree.n_actions
    first = tree.size
    tree.reserve(first + n_actions)
    kids = slice(first, first + n_actions)
    # B_by_action[u] = B[:, :, u]
    child_beliefs = B_by_action @ tree.beliefs[node]
    tree.beliefs[kids] = child_beliefs
    tree.action[kids] = np.arange(n_actions)
    tree.cost[kids] = _child_costs(child_beliefs, A, log_C, state_entropy)
    tree.visits[kids] = 1
    tree.parent[kids] = node
    tree.first_child[node] = first
    tree.size = first + n_actions
    return first


def _backpropagate(tree: PlanningTree, node: int) -> None:
    first = tree.first_child[node]
    best = tree.cost[first:first + tree.n_actions].min()
    while node != NO_CHILD:
        tree.cost[node] += best
        tree.visits[node] += 1
        node = tree.parent[node]


def preprocess(A, B, C) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Arrays the planning loop needs: ``B`` per action, ``A``, ``ln C`` and per-state entropy."""
    A = np.ascontiguousarray(A, dtype=np.float64)
    C = np.asarray(C, dtype=np.float64)
    if np.any(C <= 0):
        raise ContractViolationError("preferences C must be strictly positive")
    B_by_action = np.ascontiguousarray(np.moveaxis(np.asarray(B, dtype=np.float64), 2, 0))
    return B_by_action, A, np.log(C), column_entropy(A)


def select_node(root: TreeNode, c_explore: float) -> TreeNode:
    """Descend by maximal UCT score until a node without children is reached."""
    return TreeNode(root.tree, _select(root.tree, c_explore, root.index))


def expand_children(node: TreeNode, B, A, C) -> list[TreeNode]:
    """Create one child per action, with predicted beliefs and their expected free energy."""
    B_by_action, A, log_C, state_entropy = preprocess(A, B, C)
    if B_by_action.shape[0] != node.tree.n_actions or B_by_action.shape[1] != node.tree.n_states:
        raise ContractViolationError("transition tensor does not match the tree dimensions")
    _expand(node.tree, node.index, B_by_action, A, log_C, state_entropy)
    return node.children


def backpropagate(expanded_node: TreeNode) -> None:
    """Add the cheapest child cost and one visit to the node and all its ancestors."""
    if expanded_node.is_leaf:
        raise ContractViolationError("backpropagate needs a freshly expanded node")
    _backpropagate(expanded_node.tree, expanded_node.index)


def best_action(root: TreeNode) -> int:
    """Action of the root child with the lowest average cost (lowest index on ties)."""
    if root.is_leaf:
        raise PlanningError("planning never ran: the root has no children")
    tree = root.tree
    first = tree.first_child[root.index]
    kids = slice(first, first + tree.n_actions)
    return int(np.argmin(tree.cost[kids] / tree.visits[kids]))


def to_dot(root: TreeNode, name: str = "planning_tree") -> str:
    """Render the subtree under ``root`` as Graphviz DOT text."""
    lines = [f"digraph {name} {{", "  node [shape=box];"]
    stack = [root]
    while stack:
        node = stack.pop()
        label = f"a={node.action} n={node.visits} Ḡ={average_cost(node):.4f}"
        lines.append(f'  n{node.index} [label="{label}"];')
        for child in node.children:
            lines.append(f"  n{node.index} -> n{child.index};")
        stack.extend(reversed(node.children))
    lines.append("}")
    return "\n".join(lines) + "\n"
