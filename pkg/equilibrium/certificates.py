from dataclasses import dataclass

from geometry.profiles import Profile
from .enums import SolveMethod, EquilibriumConstants


@dataclass(frozen=True)
class EquilibriumCertificate:
    """A candidate equilibrium together with its variational-inequality residuals."""

    point: Profile
    stampacchia_residual: float
    minty_residual: float
    method: str = SolveMethod.CLOSED_FORM
    iterations: int = 0

    def is_valid(self, tol: float = EquilibriumConstants.CERTIFICATE_TOL) -> bool:
        return self.stampacchia_residual <= tol and self.minty_residual <= tol

    def as_dict(self) -> dict:
        return {
            'point': [x.tolist() for x in self.point],
            'stampacchia_residual': self.stampacchia_residual,
            'minty_residual': self.minty_residual,
            'method': self.method,
            'iterations': self.iterations,
        }
