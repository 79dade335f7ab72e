#ifndef OPTPORT_GOSSET_HPP
#define OPTPORT_GOSSET_HPP

#include <utility>

#include <Eigen/Dense>

#include "optport/errors.hpp"
#include "optport/market_data.hpp"

namespace optport {

enum class OptionKind { call, put };

// How the annualized volatility maps to the log-return scale sigma_T.
// standardized divides out the Student-t variance inflation so that the
// T-horizon log return has standard deviation sigma_ann * sqrt(T):
//   sigma_T = sigma_ann * sqrt(T) * sqrt((nu - 2) / nu).
// raw uses sigma_T = sigma_ann * sqrt(T) directly as the scale parameter.
enum class SigmaConvention { standardized, raw };

// expiry_value quotes the undiscounted time-T value C_T; present_value quotes
// exp(-rT) * C_T.
enum class Discounting { expiry_value, present_value };

struct OptionSpec {
    int underlying = 0; // index into a MarketModel
    OptionKind kind = OptionKind::call;
    double strike = 0.0;
    double expiry = 1.0; // years
};

// Truncation and integration controls.  The working support of the return
// variable is [t_quantile(p_lo), t_quantile(p_hi)]; integrals must meet
// max(abs_tol, rel_tol * |I|).
struct QuadratureConfig {
    double p_lo = 1e-5;
    double p_hi = 1.0 - 1e-5;
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    int max_depth = 15;
};

// Finite-difference step sizes for greeks: the spot bump is relative
// (h = h_spot_rel * S0), the time bump is in years.
struct BumpConfig {
    double h_spot_rel = 1e-4;
    double h_time = 1.0 / 3650.0;
};

// Value and sensitivities of one position, embedded at the underlying's index
// so books can be aggregated by simple addition: delta has one nonzero entry,
// gamma one nonzero diagonal entry.
struct GreekSet {
    double price = 0.0; // in the requested discounting convention
    double theta = 0.0; // d(price)/d(calendar time), per year
    Eigen::VectorXd delta;
    Eigen::MatrixXd gamma;
};

// [t_quantile(p_lo), t_quantile(p_hi)].  Throws DomainError unless
// 0 < p_lo < p_hi < 1.
std::pair<double, double> truncation_points(double nu, const QuadratureConfig& cfg);

// The log-return scale for a T-year horizon under the given convention.
double scaled_sigma(double sigma_ann, double expiry, double nu, SigmaConvention conv);

// Martingale normalizer of the truncated exponential-t kernel:
//   Z = integral over [x_lo, x_hi] of exp(sigma_T z) f_t(z; nu) dz / (p_hi - p_lo).
// Z -> 1 as sigma_T -> 0 and Z is increasing in sigma_T.
double gosset_normalizer(double sigma_T, double nu, const QuadratureConfig& cfg);

// European option value when the T-horizon price is S(T) = A * exp(sigma_T z)
// with z restricted to the truncated t support and A = S0 exp(rT) / Z (so
// that E[S(T)] = S0 exp(rT) exactly).  Writing t0 = ln(K/A)/sigma_T:
//
//   call = integral over [t0, x_hi] of (A e^{sigma_T z} - K) f_t(z)/(p_hi-p_lo) dz
//   put  = integral over [x_lo, t0] of (K - A e^{sigma_T z}) f_t(z)/(p_hi-p_lo) dz
//
// Put-call parity C - P = S0 exp(rT) - K holds exactly by construction.
// A call with t0 >= x_hi (or a put with t0 <= x_lo) is worthless and returns
// 0.  A call with t0 <= x_lo (or a put with t0 >= x_hi) throws
// TruncationError: the exercise boundary has left the truncated support on
// the side that must carry the payoff tail, so widen p_lo/p_hi instead.
double gosset_price(OptionKind kind, double S0, double sigma_ann, double strike,
                    double expiry, double nu, double r,
                    const QuadratureConfig& cfg = {},
                    SigmaConvention conv = SigmaConvention::standardized,
                    Discounting disc = Discounting::present_value);

// Finite-difference sensitivities of the option on m.names[opt.underlying]:
// central differences in spot for delta and gamma, a forward difference in
// calendar time for theta (theta = (P(T - h) - P(T)) / h).  Throws StepError
// when a bumped evaluation crosses the truncation boundary or the time bump
// exceeds the option's remaining life.
GreekSet gosset_greeks(const MarketModel& m, const OptionSpec& opt,
                       const QuadratureConfig& cfg = {},
                       const BumpConfig& bump = {},
                       SigmaConvention conv = SigmaConvention::standardized,
                       Discounting disc = Discounting::present_value);

} // namespace optport

#endif
