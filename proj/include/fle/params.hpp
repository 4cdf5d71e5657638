#pragma once

#include <stdexcept>
#include <string>

namespace fle {

enum class Flavor { Spectral, Restricted };

std::string to_string(Flavor flavor);
Flavor parse_flavor(const std::string& name);

/// Thrown whenever an input violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an iterative numerical procedure fails to meet its tolerance.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Problem data for (-Delta)^s u = u^{p - eps}.  The critical exponent is a
/// function of (N, s) and is never stored.
struct PhysicalParams {
    int N = 1;
    double s = 0.25;
    double eps = 0.0;
    Flavor flavor = Flavor::Spectral;

    double p() const { return (N + 2.0 * s) / (N - 2.0 * s); }
    /// Exponent of the nonlinearity, p - eps.
    double power() const { return p() - eps; }
    /// N - 2s, the decay exponent of Green's function and of the bubbles.
    double decay() const { return N - 2.0 * s; }
};

PhysicalParams make_params(int N, double s, double eps, Flavor flavor);

/// Constants from the Gamma-function formulas, plus the bubble integrals
///   c1 = int w^p,  c2 = ((N-2s)/N) int w^{p+1} / int w^p,  c3 = c1 * gamma_Ns.
struct SharpConstants {
    int N = 1;
    double s = 0.25;

    double c_Ns = 0;     // singular-integral normalisation
    double kappa_s = 0;  // weighted normal derivative normalisation
    double p_Ns = 0;     // Poisson kernel normalisation
    double gamma_Ns = 0; // fundamental solution coefficient
    double alpha_Ns = 0; // bubble amplitude
    double S_Ns = 0;     // sharp Sobolev constant

    double c1 = 0;
    double c2 = 0;
    double c3 = 0;
    double bubble_mass_p1 = 0; // int w_{1,0}^{p+1}

    double p() const { return (N + 2.0 * s) / (N - 2.0 * s); }
    double decay() const { return N - 2.0 * s; }
};

SharpConstants sharp_constants(const PhysicalParams& params);
SharpConstants sharp_constants(int N, double s);

/// |S^{N-1}| = 2 pi^{N/2} / Gamma(N/2).
double sphere_area(int N);

/// Normalisation of the singular integral;
/// valid for any s in (0,1), independently of the N > 2s requirement.
double singular_integral_constant(int N, double s);

} // namespace fle
