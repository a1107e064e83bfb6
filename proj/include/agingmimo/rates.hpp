// Rate aggregation shared by the Monte-Carlo engine and the closed-form
// pipeline, so both produce bit-identical rates from identical SINR tables.
#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace agingmimo {

struct rate_result {
    Eigen::VectorXd per_user_rate;  // bits/s/Hz, length K
    double sum_rate = 0.0;
    Eigen::MatrixXd per_slot_sinr;  // (T_c - tau) rows, K columns
};

// R_k = (1/T_c) * sum_{n=1..T_c-tau} log2(1 + gamma_{k,n}). The training
// slots carry no data, which is why the sum is shorter than the block.
inline rate_result ergodic_rate(const Eigen::MatrixXd& per_slot_gamma, int T_c, int tau) {
    const Eigen::Index slots = per_slot_gamma.rows();
    const Eigen::Index K = per_slot_gamma.cols();
    if (slots != static_cast<Eigen::Index>(T_c - tau))
        throw std::domain_error("SINR table must cover exactly the data slots");
    if ((per_slot_gamma.array() < 0.0).any())
        throw std::domain_error("negative SINR");

    rate_result out;
    out.per_slot_sinr = per_slot_gamma;
    out.per_user_rate = Eigen::VectorXd::Zero(K);
    for (Eigen::Index k = 0; k < K; ++k) {
        double acc = 0.0;
        for (Eigen::Index s = 0; s < slots; ++s)
            acc += std::log2(1.0 + per_slot_gamma(s, k));
        out.per_user_rate[k] = acc / static_cast<double>(T_c);
    }
    out.sum_rate = out.per_user_rate.sum();
    return out;
}

} // namespace agingmimo
