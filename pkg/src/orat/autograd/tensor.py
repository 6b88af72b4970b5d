import itertools
import logging
from collections.abc import Callable, Sequence
from contextvars import ContextVar, Token
from dataclasses import dataclass
from typing import Self

import numpy as np
from numpy.typing import ArrayLike, NDArray

from orat.core.exceptions import ContractError

logger = logging.getLogger(__name__)

type Array = NDArray[np.float64]
type VectorJacobian = Callable[[Array], Sequence[Array | None]]

_active_tape: ContextVar["Tape | None"] = ContextVar("active_tape", default=None)
_tape_ids = itertools.count(1)


# ==================== TENSOR ====================
class Tensor:
    """Dense 64-bit array that can take part in reverse-mode differentiation.

    Tensors created with ``requires_grad=True`` are tracked: every operation
    applied to them while a ``Tape`` is active is recorded, and ``backward``
    fills their ``grad`` buffer. Untracked tensors are plain immutable values.
    """

    __slots__ = ("data", "grad", "requires_grad", "tape_id")

    def __init__(self, data: ArrayLike, *, requires_grad: bool = False) -> None:
        self.data: Array = np.array(data, dtype=np.float64)
        self.grad: Array | None = None
        self.requires_grad = requires_grad
        self.tape_id: int | None = None

    # -- Properties --
    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def is_scalar(self) -> bool:
        return self.data.size == 1

    # -- Public methods --
    def item(self) -> float:
        if not self.is_scalar:
            raise ContractError(
                f"item() needs a single-element tensor, got shape {self.shape}",
            )

        return float(self.data.reshape(()))

    def numpy(self) -> Array:
        """Return a copy of the underlying data."""
        return self.data.copy()

    def constant(self) -> "Tensor":
        """Return an untracked tensor sharing this tensor's data."""
        out = Tensor.__new__(Tensor)
        out.data = self.data
        out.grad = None
        out.requires_grad = False
        out.tape_id = None
        return out

    def sum(self) -> "Tensor":
        from .ops import reduce_sum

        return reduce_sum(self)

    def __add__(self, other: "Tensor") -> "Tensor":
        from .ops import add

        return add(self, other)

    def __mul__(self, factor: float) -> "Tensor":
        from .ops import scale

        return scale(self, factor)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        tracked = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}{tracked})"


# ==================== TAPE ====================
@dataclass(frozen=True)
class TapeNode:
    """One recorded operation: ``vjp`` maps the output cotangent to input cotangents."""

    output: Tensor
    inputs: tuple[Tensor, ...]
    vjp: VectorJacobian
    op_name: str


class Tape:
    """Define-by-run record of operations on tracked tensors.

    Use as a context manager; operations executed inside the ``with`` block are
    appended in execution order, which is a topological order by construction.
    A tape is rebuilt for every forward pass and must not be shared between
    threads.
    """

    def __init__(self) -> None:
        self.id = next(_tape_ids)
        self.nodes: list[TapeNode] = []
        self._token: Token | None = None

    def __enter__(self) -> Self:
        self._token = _active_tape.set(self)
        return self

    def __exit__(self, *exc_info: object) -> None:
        if self._token is not None:
            _active_tape.reset(self._token)
            self._token = None

    def record(
            self,
            output: Tensor,
            inputs: tuple[Tensor, ...],
            vjp: VectorJacobian,
            op_name: str,
    ) -> None:
        output.requires_grad = True
        output.tape_id = self.id
        self.nodes.append(TapeNode(output, inputs, vjp, op_name))

    def backward(self, root: Tensor) -> None:
        """Populate ``grad`` of every tracked ancestor of ``root``.

        Gradients reaching a tensor along several paths are summed. Each node is
        visited at most once, walking the tape in reverse recording order.

        Raises:
            ContractError: ``root`` is not a scalar recorded on this tape.

        """
        if not root.is_scalar:
            raise ContractError(
                f"backward() needs a scalar root, got shape {root.shape}",
            )

        if root.tape_id != self.id:
            raise ContractError("backward() root was not recorded on this tape")

        cotangents: dict[int, Array] = {id(root): np.ones_like(root.data)}
        reached: dict[int, Tensor] = {id(root): root}

        for node in reversed(self.nodes):
            upstream = cotangents.get(id(node.output))
            if upstream is None:
                continue

            for tensor, local in zip(node.inputs, node.vjp(upstream), strict=True):
                if local is None or not tensor.requires_grad:
                    continue

                key = id(tensor)
                if key in cotangents:
                    cotangents[key] = cotangents[key] + local
                else:
                    cotangents[key] = local
                    reached[key] = tensor

        for key, tensor in reached.items():
            tensor.grad = cotangents[key]

        logger.debug(
            "Backward over %d nodes reached %d tensors.",
            len(self.nodes), len(reached),
        )


def active_tape() -> Tape | None:
    return _active_tape.get()


def backward(root: Tensor) -> None:
    """Run reverse-mode differentiation from ``root`` on the active tape."""
    tape = active_tape()
    if tape is None:
        raise ContractError("backward() called with no active tape")

    tape.backward(root)
