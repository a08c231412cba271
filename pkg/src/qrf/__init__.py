"""Quantum reference frames, superselection rules and shared-frame resources."""
from . import acceptance, align, bounded, comm, group_rep, quantum_core, resources, ssr_lift, twirl

__all__ = ["acceptance", "align", "bounded", "comm", "group_rep", "quantum_core", "resources", "ssr_lift", "twirl"]
__version__ = "0.1.0"
