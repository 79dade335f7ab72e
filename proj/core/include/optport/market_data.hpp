#ifndef OPTPORT_MARKET_DATA_HPP
#define OPTPORT_MARKET_DATA_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "optport/errors.hpp"

namespace optport {

// Per-stock market statistics plus the joint return model parameters.
// mu_ann and sigma_ann are annualized per-period return mean and volatility
// in relative terms; dt is the horizon length in years; r the continuously
// compounded financing rate; nu the Student-t tail index of joint returns.
struct MarketModel {
    std::vector<std::string> names;
    Eigen::VectorXd spot;
    Eigen::VectorXd mu_ann;
    Eigen::VectorXd sigma_ann;
    Eigen::MatrixXd corr;
    double nu = 0.0;
    double dt = 0.0;
    double r = 0.0;

    Eigen::Index size() const { return spot.size(); }

    // Throws ValidationError when any invariant fails: consistent sizes,
    // unique names, positive spots and vols, corr symmetric with unit
    // diagonal, entries in [-1, 1] and positive definite, nu > 2, dt > 0,
    // finite r.
    void validate() const;
};

// Loads a model from JSON ({"names": [...], "spot": [...], "mu_ann": [...],
// "sigma_ann": [...], "corr": [[...], ...], "nu": ..., "dt": ..., "r": ...})
// or, for a .csv path, from the csv pair (see load_market_csv; the
// correlation file is looked up as "corr.csv" next to the market file).
// Throws ParseError on malformed input, ValidationError on invalid models.
MarketModel load_market(const std::string& path);

MarketModel load_market_json(const std::string& path);

// Same schema as load_market_json but from in-memory text; origin names the
// source in error messages.
MarketModel parse_market_json(const std::string& text,
                              const std::string& origin = "<inline>");

// CSV pair format.  market_csv starts with three comment rows holding the
// scalars, then a header and one row per stock:
//
//   # nu,5.87
//   # dt,0.003968253968253968
//   # r,0.05
//   name,spot,mu_ann,sigma_ann
//   Disney,28.02,0.0151,0.1699
//
// corr_csv is a bare comma-separated square matrix in the same row order.
MarketModel load_market_csv(const std::string& market_csv,
                            const std::string& corr_csv);

// Scale matrix of the dt-horizon absolute price changes:
//   Sigma = dt * diag(spot .* sigma_ann) * corr * diag(spot .* sigma_ann).
// This is the Student-t scale matrix, not the covariance (which carries an
// extra nu/(nu-2)).
Eigen::MatrixXd build_covariance(const MarketModel& m);

// Location of the dt-horizon absolute price changes: mu = dt * mu_ann .* spot.
Eigen::VectorXd build_drift(const MarketModel& m);

} // namespace optport

#endif
