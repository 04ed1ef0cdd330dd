#pragma once

#include <Eigen/Core>
#include <vector>

namespace fusionrx {

struct FimSpec {
    long frame_len = 534;  // L >= 3 for an invertible FIM
    double sigma2 = 1.0;
};

struct WbcrbSpec {
    FimSpec fim;
    double omega_max = 0.01;
    double epsilon_max = 1e-5;
    double h = 1.0;  // weighting index, must be > 1/2
};

struct CrbReport {
    double snr_db = 0.0;
    Eigen::Matrix3d jcrb;
    Eigen::Matrix3d wbcrb;
    // Diagonals in (theta, omega, epsilon) order.
    Eigen::Vector3d jcrb_diag() const { return jcrb.diagonal(); }
    Eigen::Vector3d wbcrb_diag() const { return wbcrb.diagonal(); }
};

// Data-aided FIM: (2/sigma2) * [[L, S1, S2], [S1, S2, S3], [S2, S3, S4]] with
// power sums over k = 0..L-1 from closed-form expressions.
Eigen::Matrix3d fim(const FimSpec& spec);

// Closed-form inverse of the FIM.
Eigen::Matrix3d jcrb(const FimSpec& spec);

// Weighted Bayesian CRB: E[Q] (E[Jd] + E[Jp])^{-1} E[Q] with the polynomial
// weighting family indexed by h and uniform priors.
Eigen::Matrix3d wbcrb(const WbcrbSpec& spec);

// 3x3 inverse via the closed-form adjugate; sets the flag when the condition
// estimate exceeds 1e12.
Eigen::Matrix3d invert3(const Eigen::Matrix3d& a, bool* ill_conditioned = nullptr);

std::vector<CrbReport> bounds_sweep(const std::vector<double>& snr_db_list, long frame_len,
                                    double omega_max, double epsilon_max, double h);

}  // namespace fusionrx
