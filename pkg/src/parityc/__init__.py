"""Non-abelian low-degree group cohomology through parity quasicomplexes."""

__version__ = "0.1.0"
