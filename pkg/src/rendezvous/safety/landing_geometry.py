import itertools
import numpy                                                       as _np

class LandingGeometry():

    '''
    Where followers land on the leader's platform.

    :param float platform_radius: radius of the landing platform in meters
    :param float safe_radius: ``r_safe``, radius of the disc a follower needs to land safely, in meters
    :param list offsets: landing offsets ``c_i`` relative to the platform center, one per follower
    '''
    def __init__(self, platform_radius, safe_radius, offsets):
        self.platform_radius                        = float(platform_radius)
        self.safe_radius                            = float(safe_radius)
        self.offsets                                = [_np.asarray(c, dtype=float).reshape(3) for c in offsets]

    def to_dict(self):
        return {"platform_radius": self.platform_radius, "safe_radius": self.safe_radius,
                "offsets": [[float(v) for v in c] for c in self.offsets]}

class GeometryReport():

    '''
    Outcome of :func:`validate_landing_geometry`. Violations are data: every violated clause is listed.

    :param list violations: list of dicts with keys ``kind``, ``followers`` and ``detail``
    '''
    def __init__(self, violations):
        self.violations                             = violations

    def ok(self):
        return len(self.violations) == 0

    def describe(self):
        if self.ok():
            return "Landing geometry is admissible"
        lines                                       = ["Landing geometry violates the landing assumption:"]
        for v in self.violations:
            lines.append("  - [" + v["kind"] + "] followers " + str(v["followers"]) + ": " + v["detail"])
        return "\n".join(lines)

# Tolerance on the disc-containment clause, which is a non-strict inequality
CONTAINMENT_TOLERANCE                                               = 1e-12

def validate_landing_geometry(geom, cp):
    '''
    Checks that every landing offset keeps a safe disc inside the platform, i.e. ``r_safe < r`` and
    ``||c_i|| <= r - r_safe``, and that offsets are pairwise farther apart than the collision distance,
    ``||c_i - c_j|| > R`` (strict).

    :param LandingGeometry geom: platform and offsets
    :param CollisionParams cp: provides ``R``
    :rtype: GeometryReport
    '''
    violations                                      = []
    if not geom.safe_radius < geom.platform_radius:
        violations.append({"kind":      "platform",
                           "followers": [],
                           "detail":    "safe radius " + str(geom.safe_radius) + " is not smaller than platform radius "
                                        + str(geom.platform_radius)})

    usable                                          = geom.platform_radius - geom.safe_radius
    for idx, c in enumerate(geom.offsets):
        norm                                        = float(_np.linalg.norm(c))
        if norm > usable + CONTAINMENT_TOLERANCE:
            violations.append({"kind":      "containment",
                               "followers": [idx],
                               "detail":    "offset norm {0:.6g} exceeds r - r_safe = {1:.6g}".format(norm, usable)})

    for i, j in itertools.combinations(range(len(geom.offsets)), 2):
        distance                                    = float(_np.linalg.norm(geom.offsets[i] - geom.offsets[j]))
        if not distance > cp.min_distance:
            violations.append({"kind":      "separation",
                               "followers": [i, j],
                               "detail":    "offsets are {0:.6g} apart, need more than R = {1:.6g}".format(
                                                distance, cp.min_distance)})

    return GeometryReport(violations)

def make_hexagon_offsets(count, radius):
    '''
    Landing offsets equidistantly distributed on a circle around the platform center. Slot ``k`` sits at angle
    ``2 k pi / M``; follower ``i`` is assigned slot ``(i + floor(M/2)) mod M``, i.e. the slot diagonally opposite
    its starting bearing for even ``M`` and a fixed rotation by ``floor(M/2)`` slots for odd ``M``.

    :param int count: number of followers ``M``, at least 1
    :param float radius: circle radius in meters
    :return: list of offsets, one per follower
    '''
    if count < 1:
        raise ValueError("Need at least one follower to place landing offsets, got " + str(count))

    slots                                           = [radius * _np.array([_np.cos(2.0 * k * _np.pi / count),
                                                                           _np.sin(2.0 * k * _np.pi / count),
                                                                           0.0])
                                                       for k in range(count)]
    rotation                                        = count // 2
    return [slots[(i + rotation) % count] for i in range(count)]

def initial_ring_positions(count, radius, altitude):
    '''
    Starting positions on a ring above the platform: follower ``i`` at angle ``2 i pi / M``.

    :return: list of positions, one per follower
    '''
    return [_np.array([radius * _np.cos(2.0 * i * _np.pi / count), radius * _np.sin(2.0 * i * _np.pi / count),
                       altitude]) for i in range(count)]
