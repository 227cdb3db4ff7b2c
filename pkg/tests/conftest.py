from __future__ import annotations

import numpy as np
import pytest

from signstitch.skeleton import CanonicalSkeleton, Joint, JointLayout, default_skeleton
from signstitch.synthetic import toy_dictionary

# criterion label -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[label]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")


@pytest.fixture(scope="session")
def skel() -> CanonicalSkeleton:
    return default_skeleton()


@pytest.fixture(scope="session")
def toy_dict():
    return toy_dictionary(20, seed=1)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def chain_skeleton(joint_at: str = "b", axes: str = "z") -> CanonicalSkeleton:
    """root -> a -> b, unit bones along +x, one joint on ``joint_at``."""
    layout = JointLayout(
        keypoint_names=("root", "a", "b"),
        parent_index=(-1, 0, 1),
        groups=("body", "body", "body"),
        neck_index=0,
        shoulder_indices=(1, 2),
        torso_index=1,
    )
    kp = layout.index(joint_at)
    dirs = np.array([[0.0, 0, 0], [1, 0, 0], [1, 0, 0]])
    return CanonicalSkeleton(layout, np.array([0.0, 1.0, 1.0]), dirs, (Joint(kp, axes),),
                             tuple((kp, ax) for ax in axes))
