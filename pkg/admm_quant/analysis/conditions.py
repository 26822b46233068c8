"""
Parameter conditions under which the ADMM-Q family provably behaves.

Both predicates evaluate the inequality with sigma = rho - mu and return its
truth value; they never raise.
"""


def decrease_condition_value(lipschitz_L: float, mu: float, rho: float) -> float:
    """L_f^2 / rho - sigma / 2; the augmented Lagrangian decreases when negative"""
    sigma = rho - mu
    return lipschitz_L**2 / rho - sigma / 2.0


def check_decrease_condition(lipschitz_L: float, mu: float, rho: float) -> bool:
    if not rho > 0:
        return False
    return decrease_condition_value(lipschitz_L, mu, rho) < 0


def iadmm_condition_value(lipschitz_L: float, mu: float, rho: float, gamma: float) -> float:
    """
    2 L_f^2 / rho + 8 (rho + L_f)^2 gamma^2 / rho
        + (gamma^2 (rho + L_f) - (1 - gamma)^2 sigma) / 2
    """
    sigma = rho - mu
    rl = rho + lipschitz_L
    return (
        2.0 * lipschitz_L**2 / rho
        + 8.0 * rl**2 * gamma**2 / rho
        + (gamma**2 * rl - (1.0 - gamma) ** 2 * sigma) / 2.0
    )


def check_iadmm_condition(lipschitz_L: float, mu: float, rho: float, gamma: float) -> bool:
    if not rho > 0:
        return False
    return iadmm_condition_value(lipschitz_L, mu, rho, gamma) < 0
