import os
import subprocess
import sys

import numpy as np
import pytest

from btai_bf import _accel
from btai_bf.agent import AgentModel, plan
from btai_bf.env import DeepRewardConfig, build_model
from btai_bf.tree import PlannerConfig, best_action

from .conftest import random_model


def grow_both(model, beliefs):
    roots = {}
    for backend in _accel.BACKENDS:
        root = model.new_root(beliefs)
        roots[backend] = (plan(model, root, backend=backend), root.tree)
    return roots


def assert_same_tree(a, b):
    assert len(a) == len(b)
    n = len(a)
    for name in ("action", "visits", "parent", "first_child"):
        np.testing.assert_array_equal(getattr(a, name)[:n], getattr(b, name)[:n], err_msg=name)
    np.testing.assert_allclose(a.beliefs[:n], b.beliefs[:n], rtol=0, atol=1e-12)
    np.testing.assert_allclose(a.cost[:n], b.cost[:n], rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("seed", range(25))
def test_backends_grow_identical_trees(seed):
    rng = np.random.default_rng(seed)
    # |S| = 1 or |O| = 1 makes every child cost tie exactly, and summation order
    # then decides ties at the 1e-15 level differently per backend
    n_states, n_obs, n_actions = rng.integers(2, 6), rng.integers(2, 4), rng.integers(1, 5)
    A, B, C, D = random_model(rng, n_states, n_obs, n_actions)
    c_explore = float(rng.uniform(0, 4))
    model = AgentModel(A, B, C, D, PlannerConfig(c_explore, int(rng.integers(1, 80))))
    roots = grow_both(model, D)
    assert roots["numba"][0] == roots["numpy"][0] == best_action(roots["numba"][1].root)
    assert_same_tree(roots["numba"][1], roots["numpy"][1])


@pytest.mark.parametrize("n_iter", [25, 100])
def test_backends_agree_on_deep_reward(n_iter):
    A, B, C, D = build_model(DeepRewardConfig(3, 5, (6, 5, 8)))
    model = AgentModel(A, B, C, D, PlannerConfig(2.0, n_iter))
    roots = grow_both(model, D)
    assert roots["numba"][0] == roots["numpy"][0] == 2
    assert_same_tree(roots["numba"][1], roots["numpy"][1])


def test_plan_extends_a_partially_planned_tree():
    A, B, C, D = build_model(DeepRewardConfig(2, 5, (5, 8)))
    model = AgentModel(A, B, C, D, PlannerConfig(2.0, 10))
    trees = []
    for backend in _accel.BACKENDS:
        root = model.new_root(D)
        plan(model, root, backend=backend)
        plan(model, root, backend=backend)
        trees.append(root.tree)
        assert root.visits == 21
    assert_same_tree(*trees)


def test_resolve_backend():
    assert _accel.resolve_backend(None) == _accel.BACKEND
    assert _accel.resolve_backend("numpy") == "numpy"
    with pytest.raises(ValueError):
        _accel.resolve_backend("cuda")


@pytest.mark.parametrize("value, expected", [("numpy", "numpy"), ("NUMBA", "numba"), ("", "numba")])
def test_environment_flag(value, expected):
    env = dict(os.environ, BTAI_BF_BACKEND=value)
    out = subprocess.run(
        [sys.executable, "-c", "import btai_bf; print(btai_bf.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == expected


def test_environment_flag_rejects_unknown():
    env = dict(os.environ, BTAI_BF_BACKEND="fortran")
    out = subprocess.run([sys.executable, "-c", "import btai_bf"], env=env, capture_output=True, text=True)
    assert out.returncode != 0 and "BTAI_BF_BACKEND" in out.stderr
