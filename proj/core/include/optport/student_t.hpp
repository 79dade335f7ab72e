#ifndef OPTPORT_STUDENT_T_HPP
#define OPTPORT_STUDENT_T_HPP

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "optport/errors.hpp"

namespace optport {

// Density of the standard Student-t distribution with nu degrees of freedom.
// Computed through lgamma so it stays finite for large nu.
double t_pdf(double z, double nu);

// CDF of the standard Student-t distribution, via the regularized incomplete
// beta function.  Exact symmetry: t_cdf(-z) == 1 - t_cdf(z).
double t_cdf(double z, double nu);

// Inverse CDF.  All quantiles in this library (t and normal) go through the
// same bracketing bisection on the CDF, so there is a single code path to
// trust; accuracy is limited only by the CDF itself.
double t_quantile(double p, double nu);

double normal_pdf(double z);
double normal_cdf(double z);
double normal_quantile(double p);

// Parameters of a multivariate Student-t: location mu, scale matrix (NOT the
// covariance; the covariance is nu/(nu-2) * scale for nu > 2), tail index nu.
struct TParams {
    double nu = 0.0;
    Eigen::VectorXd mu;
    Eigen::MatrixXd scale;
};

// Streaming multivariate Student-t sampler: Y = mu + L z * sqrt(nu / w) with
// L the Cholesky factor of the scale matrix, z iid standard normal
// (Box-Muller) and w ~ chi^2_nu (Marsaglia-Tsang, doubled Gamma(nu/2)).
//
// Determinism: a given (params, seed) pair always yields the same draw
// sequence, independent of platform, because every variate is built from raw
// mt19937_64 output mapped to [0,1) as (word >> 11) * 2^-53.  Per draw the
// stream is consumed as: dim normals for z, then the chi-square.  The layout
// is stable across runs; treat it as unspecified across library versions.
class MvtSampler {
public:
    MvtSampler(TParams params, std::uint64_t seed);

    // Next draw, written into out (size dim()).
    void draw(Eigen::Ref<Eigen::VectorXd> out);
    Eigen::VectorXd draw();

    Eigen::Index dim() const { return params_.mu.size(); }
    const TParams& params() const { return params_; }

private:
    double next_uniform();     // in [0, 1)
    double next_normal();      // standard normal, Box-Muller with cached spare
    double next_gamma(double a); // Gamma(a, 1), Marsaglia-Tsang

    TParams params_;
    Eigen::MatrixXd chol_;
    std::mt19937_64 rng_;
    Eigen::VectorXd z_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// n draws as rows of an n x dim matrix.  Row i equals the i-th draw of an
// MvtSampler constructed with the same (params, seed).
Eigen::MatrixXd sample_mvt(const TParams& params, std::size_t n,
                           std::uint64_t seed);

} // namespace optport

#endif
