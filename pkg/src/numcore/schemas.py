from pydantic import ConfigDict, Field

from src.models import CustomModel


class BetaParams(CustomModel):
    """Shape parameters of a beta distribution."""
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., gt=0, description="First shape parameter")
    beta: float = Field(..., gt=0, description="Second shape parameter")

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)

    @property
    def variance(self) -> float:
        total = self.alpha + self.beta
        return self.alpha * self.beta / (total * total * (total + 1.0))

    @property
    def concentration(self) -> float:
        return self.alpha + self.beta

    @classmethod
    def from_counts(cls, n: int, x: int, alpha0: float = 1.0, beta0: float = 1.0) -> "BetaParams":
        """Conjugate update of Beta(alpha0, beta0) with x responders among n."""
        return cls(alpha=alpha0 + x, beta=beta0 + (n - x))
