from collections.abc import Callable
from typing import TYPE_CHECKING, Any, Protocol

if TYPE_CHECKING:
    from orat.autograd import Tensor


class Classifier(Protocol):
    """Anything that maps a parameter set and a batch of inputs to logits.

    ``forward`` must record the logits on the active tape so backward reaches
    both the parameters and the inputs. ``without_tracking`` returns the same
    parameter values with gradient tracking off, for input-gradient-only passes.
    """

    def forward(self, params: Any, x: "Tensor") -> "Tensor": ...

    def without_tracking(self, params: Any) -> Any: ...


type MarginLoss = Callable[[float], float]
