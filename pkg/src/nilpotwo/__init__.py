"""Large nilpotent subgroups of class at most 2 in finite permutation groups.

Modules: ``permutation`` and ``chain`` (permutations, stabilizer chains),
``table_group`` (Cayley tables and exhaustive oracles), ``structure``
(series, radicals, socle, Sylow), ``construct`` (group families and the
corpus), ``theorem`` (bounds, certificates, pipelines), ``groupio`` and
``cli`` (formats and the command line).
"""

__version__ = "0.1.0"
