"""Path rewriting used by the Hamiltonicity strategy.

Given a path ``P = (v_1, ..., v_m)`` with ``v_1 = y``, an outside vertex
``x`` and two star edges ``x x'`` and ``y y'`` already owned by Maker, one new
edge lets Maker rebuild a longer path that starts at ``x`` and still ends at
``v_m``.  Which edge depends on whether ``x'`` and ``y'`` lie on the path.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from .board import ContractError, Edge


class SurgeryCase(enum.Enum):
    BOTH_OUTSIDE = "a"
    BOTH_ON_PATH = "b"
    X_ON_PATH = "c"
    Y_ON_PATH = "d"


@dataclass(frozen=True)
class Surgery:
    case: SurgeryCase
    edge: Edge
    order: Tuple[int, ...]
    added: Tuple[int, ...]


@dataclass(frozen=True)
class Degenerate:
    case: SurgeryCase
    why: str


def _e(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def path_surgery(path: Sequence[int], x: int, xp: int, yp: int,
                 owns: Optional[Callable[[int, int], bool]] = None,
                 index: Optional[Dict[int, int]] = None) -> Union[Surgery, Degenerate]:
    """Designated edge and rewritten order, or :class:`Degenerate`.

    ``path[0]`` is ``y``.  ``index`` maps path vertices to 0-based positions
    (computed if omitted).  ``owns(u, v)`` reports Maker's own edges; a
    designated edge she already owns makes the pair degenerate.
    """
    m = len(path)
    if m < 1:
        raise ContractError("empty path")
    y = path[0]
    if index is None:
        index = {v: i for i, v in enumerate(path)}
    if x in index:
        raise ContractError(f"x={x} already on the path")
    if xp in (x, y) or yp in (x, y) or xp == yp:
        raise ContractError(f"star endpoints {xp},{yp} clash with x={x}, y={y}")
    v = path  # 0-based: v[i - 1] is v_i
    ix = index.get(xp)
    iy = index.get(yp)
    if ix is None and iy is None:
        case = SurgeryCase.BOTH_OUTSIDE
        edge = _e(xp, yp)
        order = [x, xp, yp, y] + list(v[1:])
        added = (x, xp, yp)
    elif ix is not None and iy is not None:
        case = SurgeryCase.BOTH_ON_PATH
        i, j = ix + 1, iy + 1
        if i < j:
            if j == m:
                return Degenerate(case, "v_{j+1} does not exist")
            edge = _e(v[i - 2], v[j])
            # (x, v_i, v_{i+1}..v_{j-1}, v_j, v_1, v_2..v_{i-1}, v_{j+1}..v_m)
            order = [x] + list(v[i - 1:j]) + [y] + list(v[1:i - 1]) + list(v[j:])
        else:
            if i == m:
                return Degenerate(case, "v_{i+1} does not exist")
            edge = _e(v[j - 2], v[i])
            # (x, v_i, v_{i-1}..v_{j+1}, v_j, v_1, v_2..v_{j-1}, v_{i+1}..v_m)
            order = [x] + list(v[j - 1:i][::-1]) + [y] + list(v[1:j - 1]) + list(v[i:])
        added = (x,)
    elif ix is not None:
        case = SurgeryCase.X_ON_PATH
        i = ix + 1
        if i == m:
            return Degenerate(case, "v_{i+1} does not exist")
        edge = _e(v[i], yp)
        # (x, v_i, v_{i-1}..v_2, v_1, y', v_{i+1}..v_m)
        order = [x] + list(v[1:i][::-1]) + [y, yp] + list(v[i:])
        added = (x, yp)
    else:
        case = SurgeryCase.Y_ON_PATH
        i = iy + 1
        edge = _e(xp, v[i - 2])
        # (x, x', v_{i-1}..v_2, v_1, v_i, v_{i+1}..v_m)
        order = [x, xp] + list(v[1:i - 1][::-1]) + [y, yp] + list(v[i:])
        added = (x, xp)
    if owns is not None and owns(*edge):
        return Degenerate(case, "designated edge already owned")
    return Surgery(case, edge, tuple(order), added)


def path_edges(order: Sequence[int]) -> List[Edge]:
    return [_e(order[t], order[t + 1]) for t in range(len(order) - 1)]
