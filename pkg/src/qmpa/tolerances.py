from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by every module.

    ``hermitian`` and ``positive`` are relative: an operator is hermitian when
    ``||A - A^+||_F <= hermitian * max(1, ||A||_F)`` and strictly positive when
    its smallest eigenvalue exceeds ``positive * Tr(A) / N``.

    ``peripheral`` is absolute for discrete models and multiplied by the
    Frobenius norm of the generator for continuous ones.
    """

    hermitian: float = 1e-10
    positive: float = 1e-10
    trace: float = 1e-8
    peripheral: float = 1e-9
    cluster: float = 1e-8
    kernel: float = 1e-8
    eigen: float = 1e-8
    defect: float = 1e-10
    check: float = 1e-8
    gram_pivot: float = 1e-10

    def updated(self, overrides):
        """Return a copy with entries of the mapping ``overrides`` applied."""
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT = Tolerances()
