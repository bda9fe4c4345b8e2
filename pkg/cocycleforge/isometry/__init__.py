from .orthogonal import OrthogonalMap, gram_schmidt, planar_rotation, block_rotations
from .euclidean import EuclideanIsometry, FiberVector, compose, inverse, apply
