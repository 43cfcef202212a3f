#pragma once

// Reference values printed by tests/oracles/radial_oracle.py (sympy moments plus QUADPACK
// Fourier-weighted quadrature; shares no code with the library). Default profiles, R = 1.
namespace oracle {

namespace charged {
inline constexpr double amplitude = 5.0476737211795033;
inline constexpr double I = 0.095238095238095233;  // 2/21
inline constexpr double rho_hat_1 = 0.06199820575619195;
inline constexpr double rho_hat_5 = 0.03444031122127194;
inline constexpr double rho_tilde_0 = -0.0030235064730590941;
inline constexpr double rho_tilde_1 = -0.0029584313156101197;
inline constexpr double rho_tilde_5 = -0.0017340170586513724;
inline constexpr double rho_tilde_sq_integral = 0.0051857049982094268;
inline constexpr double kappa_cos_0 = 0.10706955613950053;
inline constexpr double kappa_cos_1 = 0.010918296230716098;
inline constexpr double kappa_sin_1 = -0.0012880533994039179;
inline constexpr double alpha = -0.03629993498746599;
inline constexpr double soliton_energy = 0.15046886341686763;  // |omega| = 1
}  // namespace charged

namespace neutral {
inline constexpr double amplitude = -5.0476737211795033;
inline constexpr double beta = 7.0;
inline constexpr double I = 0.049689440993788817;  // 8/161
inline constexpr double rho_hat_1 = -0.00077311122972771281;
inline constexpr double rho_hat_5 = -0.011844282062443711;
inline constexpr double rho_tilde_0 = -0.0015774816381184311;
inline constexpr double rho_tilde_1 = -0.0015152520694600229;
inline constexpr double rho_tilde_sq_integral = 0.00078359149831112461;
inline constexpr double kappa_cos_0 = 0.029730383318285324;
inline constexpr double kappa_cos_1 = -0.0016873370593252896;
inline constexpr double kappa_sin_1 = -0.00084629614442887095;
inline constexpr double alpha = -0.010513185935674255;
inline constexpr double soliton_energy = 0.031935870587469065;
}  // namespace neutral

}  // namespace oracle
