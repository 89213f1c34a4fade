"""stl-lab: physics-driven sound transmission loss simulators with
Latin-hypercube dataset generation, ML surrogates, and sensitivity/benchmark
harnesses for isotropic rectangular plates.

Submodules import lazily so the CLI can configure threading before any
numerical library loads.
"""

__version__ = "0.1.0"

_SUBMODULES = (
    "plate", "grids", "quadrature", "infinite", "correction", "modal",
    "simulate", "dataset", "preprocess", "cart", "surrogates",
    "sensitivity", "evaluation", "errors", "cli",
)


def __getattr__(name):
    if name in _SUBMODULES:
        import importlib

        module = importlib.import_module(f".{name}", __name__)
        globals()[name] = module
        return module
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(list(globals()) + list(_SUBMODULES))
