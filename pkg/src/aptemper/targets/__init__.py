from .base import TargetDensity
from .bridge import BridgeModel, bridge_log_posterior
from .io import StandardizationReport, build_target, load_regression_csv, standardize
from .mixture import GaussianMixture, mixture_log_density
from .product import ProductExtendedTarget, product_log_density


def peaks20():
    """The canonical 2D twenty-peak benchmark mixture."""
    return build_target("peaks20")


def peaks20_8d():
    """Canonical mixture times six unit uniforms (8 dimensions)."""
    return build_target("peaks20_8d")


__all__ = [
    "TargetDensity", "GaussianMixture", "ProductExtendedTarget", "BridgeModel",
    "mixture_log_density", "product_log_density", "bridge_log_posterior",
    "load_regression_csv", "standardize", "StandardizationReport", "build_target",
    "peaks20", "peaks20_8d",
]
