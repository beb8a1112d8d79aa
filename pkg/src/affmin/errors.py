"""Exception types shared by all affmin modules."""


class AffminError(Exception):
    """Base class for all errors raised by this package."""


class DomainTooSmall(AffminError):
    """A grid domain is too small for the requested stencil."""


class DomainMismatch(AffminError):
    """Two grids that must live on compatible domains do not."""


class NotHarmonic(AffminError):
    """A co-normal vertex grid fails the mixed-difference harmonicity test.

    Attributes:
        max_residual: worst |mixed difference| component over all faces.
        faces: list of (u, v) face indices whose residual exceeds tolerance.
    """

    def __init__(self, max_residual, faces):
        self.max_residual = max_residual
        self.faces = list(faces)
        super().__init__(
            f"co-normal field is not harmonic: max residual {max_residual:.3e} "
            f"on {len(self.faces)} face(s), worst at {self.faces[:4]}"
        )


class NonConvexFace(AffminError):
    """The area density F is not strictly positive on some face.

    Attributes:
        face: (u, v) index of the offending face (value stored at u+1/2, v+1/2).
        value: the offending F value.
    """

    def __init__(self, face, value, detail=""):
        self.face = face
        self.value = value
        msg = f"non-positive area density F={value:.6g} at face {face}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class NonPositiveVolume(AffminError):
    """A face of an immersion has non-positive quadrangle volume M.

    Attributes:
        face: (u, v) index of the offending face.
        value: the offending M value.
    """

    def __init__(self, face, value):
        self.face = face
        self.value = value
        super().__init__(f"non-positive face volume M={value:.6g} at face {face}")


class IllDefinedForm(AffminError):
    """The cubic-form determinant disagrees across adjacent face choices.

    Attributes:
        vertex: (u, v) index of the offending vertex.
        spread: max pairwise disagreement between the face choices.
    """

    def __init__(self, vertex, spread):
        self.vertex = vertex
        self.spread = spread
        super().__init__(
            f"cubic form ill-defined at vertex {vertex}: face choices differ by {spread:.3e}"
        )


class SeedDeterminantMismatch(AffminError):
    """A reconstruction seed violates the corner determinant condition.

    Attributes:
        expected: the required determinant (F squared on the first face).
        actual: the seed's determinant.
    """

    def __init__(self, expected, actual):
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"seed determinant {actual:.12g} does not match required F^2 = {expected:.12g}"
        )


class IncompatibleData(AffminError):
    """Fundamental data admits no surface: two-way extension disagrees.

    Attributes:
        face: (u, v) index where the two marching routes disagree.
        gap: relative disagreement between the two extensions.
    """

    def __init__(self, face, gap):
        self.face = face
        self.gap = gap
        super().__init__(
            f"incompatible fundamental data: two-way extension differs by {gap:.3e} at face {face}"
        )


class DegenerateQuadrangle(AffminError):
    """The corner quadrangle spans no volume, so no affine map is determined."""


class NotEquivalent(AffminError):
    """No affine map carries one immersion onto the other.

    Attributes:
        vertex: (u, v) index of the worst-matching vertex.
        gap: relative mismatch at that vertex.
    """

    def __init__(self, vertex, gap):
        self.vertex = vertex
        self.gap = gap
        super().__init__(
            f"surfaces are not affine equivalent: gap {gap:.3e} at vertex {vertex}"
        )
