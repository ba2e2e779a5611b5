#pragma once

// Every numeric threshold used by the library lives here.

namespace entsplit::tol {

// Round-off allowed in exact representations (hermiticity, normalization).
inline constexpr double kRepresentation = 1e-12;
// Eigenvalue / singular value accuracy.
inline constexpr double kSpectral = 1e-10;
// Linear independence of spanning vectors.
inline constexpr double kRank = 1e-10;
// Projector algebra: idempotence, orthogonality, completeness.
inline constexpr double kProjector = 1e-9;
// Polynomial coefficients in the 2 x d pencil certificate.
inline constexpr double kCertificateCoefficient = 1e-10;
// Back-substitution residual accepted as an exact common root.
inline constexpr double kCertificateResidual = 1e-9;
// A Ket is product across a cut when its second Schmidt coefficient is below this.
inline constexpr double kProductSchmidt = 1e-9;
// A post-measurement state is entangled when its second Schmidt coefficient exceeds this.
inline constexpr double kEntangledSchmidt = 1e-6;
// Born probabilities at or below this are treated as impossible outcomes.
inline constexpr double kZeroProbability = 1e-12;
// Outcomes enumerated when their probability exceeds this.
inline constexpr double kOutcomeProbability = 1e-9;
// Expectation value treated as exactly zero / strictly positive.
inline constexpr double kZeroOverlap = 1e-9;
inline constexpr double kPositiveOverlap = 1e-6;
// Partial-transpose eigenvalue counted as negative.
inline constexpr double kNegativeEigenvalue = 1e-9;

}  // namespace entsplit::tol
