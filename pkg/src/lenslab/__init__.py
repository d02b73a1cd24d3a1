"""lenslab: numerics for planar lens partitions and a nonlocal droplet model.

Subpackages:
    geometry         planar primitives and the analytic standard lens
    partitions       lens-type 3-partitions, deficit, distance, asymmetry
    perturb          generators for competitor families
    stability        quadratic lower/upper bounds and empirical kappa estimates
    riesz            triangle-pair quadrature for Riesz interaction energies
    nonlocal_energy  the perimeter - wetting + Riesz functional and optimizer
    cli              experiment orchestration and artifact emission
"""

__version__ = "0.1.0"
