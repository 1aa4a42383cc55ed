"""Small numerical helpers: RK4 stepping, skew matrices, frame cleanup, FD stencils."""

import numpy as np

EPS = np.finfo(float).eps
FD_STEP_FIRST = EPS ** (1.0 / 3.0)   # central first differences
FD_STEP_SECOND = EPS ** 0.25         # central second differences


def rk4_step(f, t, y, h):
    """One classical fourth-order step of y' = f(t, y)."""
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def cross3(a, b):
    """Cross product of 3-vectors; avoids np.cross overhead in hot loops."""
    return np.array(
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    )


def solve2(E, F, G, x, y):
    """Solve the symmetric 2x2 system [[E, F], [F, G]] @ (a, b) = (x, y)."""
    det = E * G - F * F
    return (G * x - F * y) / det, (E * y - F * x) / det


def hat(w):
    """Skew matrix of w, so that hat(w) @ x == cross(w, x)."""
    wx, wy, wz = w
    return np.array([[0.0, -wz, wy], [wz, 0.0, -wx], [-wy, wx, 0.0]])


def vee(Q, check=True, tol=1e-8):
    """Axial vector of a skew matrix Q (inverse of hat).

    Raises ValueError when the asymmetry ||Q + Q^T|| exceeds tol times the
    matrix scale; a non-skew Q here means an upstream frame went bad.
    """
    if check:
        scale = max(1.0, float(np.abs(Q).max()))
        asym = float(np.abs(Q + Q.T).max())
        if asym > tol * scale:
            raise ValueError(f"matrix is not skew-symmetric (asymmetry {asym:.3e})")
    return np.array([Q[2, 1], Q[0, 2], Q[1, 0]])


def orthonormalize_frame(M):
    """Nearest-by-construction special-orthogonal matrix via modified Gram-Schmidt.

    Columns are orthonormalized in order; the determinant sign is fixed by
    flipping the last column if needed.
    """
    q1 = M[:, 0] / np.linalg.norm(M[:, 0])
    q2 = M[:, 1] - np.dot(M[:, 1], q1) * q1
    q2 /= np.linalg.norm(q2)
    q3 = M[:, 2] - np.dot(M[:, 2], q1) * q1
    q3 -= np.dot(q3, q2) * q2
    n3 = np.linalg.norm(q3)
    if n3 < 1e-12:
        q3 = np.cross(q1, q2)
    else:
        q3 /= n3
        if np.dot(np.cross(q1, q2), q3) < 0.0:
            q3 = -q3
    return np.column_stack([q1, q2, q3])


def rotation_about_axis(axis, angle):
    """Rodrigues rotation matrix about a unit axis."""
    K = hat(axis)
    return np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * (K @ K)


# Fourth-order first-derivative stencils on a uniform grid (coefficients / 12h).
_FWD0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0])
_FWD1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0])


def sampled_derivative(values, dt):
    """Fourth-order finite differences of uniformly sampled values.

    ``values`` has shape (n, ...); differences act along axis 0. Falls back
    to np.gradient for n < 5.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    if n < 5:
        return np.gradient(values, dt, axis=0)
    flat = values.reshape(n, -1)
    out = np.empty_like(flat)
    out[0] = _FWD0 @ flat[:5] / (12.0 * dt)
    out[1] = _FWD1 @ flat[:5] / (12.0 * dt)
    out[2:-2] = (-flat[4:] + 8.0 * flat[3:-1] - 8.0 * flat[1:-3] + flat[:-4]) / (12.0 * dt)
    out[-2] = -(_FWD1 @ flat[-1:-6:-1]) / (12.0 * dt)
    out[-1] = -(_FWD0 @ flat[-1:-6:-1]) / (12.0 * dt)
    return out.reshape(values.shape)


def one_sided_derivative(values, dt):
    """Fourth-order one-sided first derivative at index 0 (needs >= 5 samples)."""
    values = np.asarray(values, dtype=float)
    if values.shape[0] < 5:
        raise ValueError("one-sided fourth-order stencil needs at least 5 samples")
    flat = values.reshape(values.shape[0], -1)
    return (_FWD0 @ flat[:5] / (12.0 * dt)).reshape(values.shape[1:])
