from dataclasses import dataclass
from typing import Optional

from geometry.profiles import Profile


@dataclass(frozen=True)
class RunState:
    """
    Stage index and candidate profile X_n.

    For bandit runs ``realized`` is the profile X̂ played at the stage that
    produced this state; it is None for the initial state and gradient runs.
    """

    n: int
    actions: Profile
    realized: Optional[Profile] = None
