"""Learn crafting dependency graphs by interaction and plan over them."""
from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
