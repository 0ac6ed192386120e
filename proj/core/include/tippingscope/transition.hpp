#pragma once
#include <vector>

#include "errors.hpp"
#include "models.hpp"
#include "odeint.hpp"
#include "poincare.hpp"

namespace tippingscope::transition {

/// One equilibrium of the past autonomous equation y' = h(0, y).
struct PastRoot {
    double y = 0;
    double h_y = 0;  ///< linearization at the root
    poincare::Stability stability = poincare::Stability::Neutral;
};

/// Equilibria of the past equation, ascending; expected pattern is three
/// roots 0 = c_l < c_m < c_u with stabilities Attractive/Repulsive/Attractive.
struct PastLimits {
    std::vector<PastRoot> roots;
};

/// Roots of y ↦ h(0, y) on [−5, 60] by scan + bisection to 1e-10.
/// Throws UnexpectedRootCount if the count differs from three (the model is
/// outside the critical-transition regime).
PastLimits past_limits(const models::AlleePredationModel& base);

enum class Branch { Lower, Upper };

/// Controls for pullback-solution construction and its convergence
/// certificate.
struct PullbackOptions {
    double t_past = -2.5e5;    ///< start time; Γ and ω̄ must be near their past limits
    double burn_in = 1e3;      ///< pullback transient discarded by callers
    double cert_offset = 1e3;  ///< second start at t_past − cert_offset
    double cert_tol = 1e-6;    ///< agreement required at t = 0
    bool certify = true;       ///< re-run from the earlier start and compare

    /// Long-horizon tolerance preset (1e-9); spans up to ~10⁶ time units
    /// make the integrator default of 1e-12 wasteful.
    odeint::IntegratorConfig integ{1e-9, 1e-9, 1e-4, 1e-14, 1e3, 1e7};
};

/// Integrates the locally pullback attractive solution of the given branch
/// from (t_past, past root) to t_end.  The Lower branch starts at c_l = 0,
/// the Upper branch at c_u.  When opt.certify, a second run from
/// t_past − cert_offset must agree within cert_tol at t = 0 (or at t_end if
/// t_end < 0); otherwise NotConverged is thrown.
odeint::Trajectory pullback_solution(const models::TransitionModel& model,
                                     Branch which, double t_end,
                                     const PullbackOptions& opt = {});

enum class RunClass { Tracking, Tipping };

/// Tracking iff the upper pullback solution stays ε-separated from the lower
/// one (≡ 0 for this model) at the horizon.  An early Tipping exit fires once
/// the upper solution falls below half the smallest middle root of the
/// unperturbed equation, after which decay to 0 is certain.
RunClass classify_run(const models::TransitionModel& model, double rho,
                      double horizon, double epsilon,
                      const PullbackOptions& opt = {});

/// Bisection record for the critical perturbation size ρ₀.
struct TippingReport {
    std::vector<double> rho_values;           ///< every probed ρ, in probe order
    std::vector<RunClass> classifications;    ///< matching classifications
    double rho_lo = 0;                        ///< largest ρ classified Tracking
    double rho_hi = 0;                        ///< smallest ρ classified Tipping
    double horizon = 0;
    double epsilon = 0;
};

/// Bisects [rho_lo, rho_hi] on the Tracking/Tipping boundary until the
/// bracket is ≤ tol; monotonicity of ρ ↦ u_ρ makes the classification
/// monotone.  Throws BadBracket unless rho_lo classifies Tracking and
/// rho_hi Tipping.
TippingReport locate_tipping(const models::TransitionModel& model,
                             double rho_lo, double rho_hi, double tol,
                             double horizon, double epsilon,
                             const PullbackOptions& opt = {});

/// (1/(t1−t0))·∫ f_x(s, x(s)) ds along a dense trajectory: negative values
/// evidence attractive hyperbolicity, positive repulsive.
double finite_time_exponent(const odeint::ScalarField& f,
                            const odeint::Trajectory& traj,
                            double t0, double t1);

} // namespace tippingscope::transition
