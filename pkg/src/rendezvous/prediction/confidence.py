import math
import numpy                                                       as _np

from rendezvous.util.errors                                         import ConfigurationError

class ConfidenceParams():

    '''
    Confidence level ``p`` of the prediction ellipsoids ``{ b : b^T P^-1 b <= s }`` with ``s = -2 ln(1 - p)``, which
    is the ``p``-quantile of a chi-square distribution with two degrees of freedom.

    :param float level: ``p`` in (0, 1)
    '''
    def __init__(self, level):
        if not 0.0 < level < 1.0:
            raise ConfigurationError("confidence level must lie in (0, 1), got " + str(level),
                                     field_path="prediction.confidence")
        self.level                                  = float(level)
        self.scale                                  = -2.0 * math.log1p(-self.level)

def lambda_max(P):
    '''
    Largest eigenvalue of a symmetric positive semidefinite matrix, by the symmetric eigensolver. Tiny negative
    values from rounding are clipped to 0.

    :param P: shape ``(n, n)`` or ``(K, n, n)``
    '''
    P                                               = _np.asarray(P, dtype=float)
    sym                                             = 0.5 * (P + _np.swapaxes(P, -1, -2))
    return _np.maximum(_np.linalg.eigvalsh(sym)[..., -1], 0.0)

def confidence_radius(P, cp):
    '''
    Worst-case deviation ``sqrt(s lambda_max(P))`` of a point inside the confidence ellipsoid of ``P``.

    :param P: position covariance(s)
    :param ConfidenceParams cp: confidence level
    '''
    return _np.sqrt(cp.scale * lambda_max(P))

def radius_threshold(platform_radius, safe_radius, cp):
    '''
    Largest ``lambda_max`` for which ``r_safe + sqrt(s lambda_max) < r`` can hold, i.e. ``(r - r_safe)^2 / s``.
    '''
    return (platform_radius - safe_radius) ** 2 / cp.scale
