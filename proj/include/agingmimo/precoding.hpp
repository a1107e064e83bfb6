// Downlink precoders operating on aged channel estimates, plus the power
// normalization constant estimated from precoder draws.
#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "agingmimo/channel.hpp"
#include "agingmimo/config.hpp"
#include "agingmimo/errors.hpp"
#include "agingmimo/reduce.hpp"

namespace agingmimo {

struct precoder {
    Eigen::MatrixXcd F; // M x K, one column per user
    precoder_kind kind = precoder_kind::mrt;
    bool degenerate = false; // all columns vanished
};

namespace detail {
// Column k of the effective matrix B = [A_1 ghat_1, ..., A_K ghat_K].
inline Eigen::MatrixXcd apply_aging_columns(const Eigen::MatrixXcd& G_hat,
                                            const std::vector<aging_operator>& A) {
    const Eigen::Index M = G_hat.rows(), K = G_hat.cols();
    if (static_cast<Eigen::Index>(A.size()) != K)
        throw config_error("one aging operator per user is required");
    Eigen::MatrixXcd B(M, K);
    for (Eigen::Index k = 0; k < K; ++k) {
        const aging_operator& Ak = A[static_cast<std::size_t>(k)];
        if (Ak.scalar)
            B.col(k) = Ak.as_scalar() * G_hat.col(k);
        else
            B.col(k) = G_hat.col(k).cwiseProduct(
                Ak.diag(static_cast<int>(M)).cast<std::complex<double>>());
    }
    return B;
}
} // namespace detail

// Matched filter toward the aged estimates: f_k = A_k ghat_k.
inline precoder mrt_precoder(const Eigen::MatrixXcd& G_hat, const std::vector<aging_operator>& A) {
    precoder p;
    p.kind = precoder_kind::mrt;
    p.F = detail::apply_aging_columns(G_hat, A);
    p.degenerate = p.F.norm() == 0.0;
    return p;
}

// Regularized zero-forcing: F = (B B^H + Z + M a I)^{-1} B with B the aged
// estimate matrix. The regularized Gram is Hermitian positive definite for
// a > 0 and PSD Z.
inline precoder rzf_precoder(const Eigen::MatrixXcd& G_hat, const std::vector<aging_operator>& A,
                             const Eigen::MatrixXcd& Z, double a) {
    if (!(a > 0.0)) throw numeric_error("RZF regularization must be positive");
    const Eigen::Index M = G_hat.rows();

    precoder p;
    p.kind = precoder_kind::rzf;
    const Eigen::MatrixXcd B = detail::apply_aging_columns(G_hat, A);
    Eigen::MatrixXcd gram = B * B.adjoint();
    if (Z.size() != 0) {
        if (Z.rows() != M || Z.cols() != M)
            throw config_error("Z must be M x M");
        gram += Z;
    }
    gram += static_cast<double>(M) * a * Eigen::MatrixXcd::Identity(M, M);

    const Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw numeric_error("RZF regularized Gram matrix is not positive definite");
    p.F = llt.solve(B);
    p.degenerate = p.F.norm() == 0.0;
    return p;
}

inline precoder make_precoder(const Eigen::MatrixXcd& G_hat, const std::vector<aging_operator>& A,
                              const system_config& cfg, precoder_kind kind) {
    return kind == precoder_kind::mrt ? mrt_precoder(G_hat, A)
                                      : rzf_precoder(G_hat, A, cfg.rzf_Z, cfg.rzf_alpha);
}

// Power normalization lambda = 1 / E[(1/K) tr F F^H], estimated over draws.
// The expectation is reduced pairwise so the value does not depend on how
// the draws were batched.
inline double estimate_lambda(const std::vector<Eigen::MatrixXcd>& draws, int K) {
    if (draws.empty()) throw config_error("lambda estimate needs at least one draw");
    if (K <= 0) throw config_error("K must be positive");
    std::vector<double> traces(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i)
        traces[i] = draws[i].squaredNorm() / static_cast<double>(K);
    const double mean = pairwise_sum(traces) / static_cast<double>(draws.size());
    if (mean <= 0.0) throw numeric_error("degenerate precoder: zero mean transmit power");
    return 1.0 / mean;
}

} // namespace agingmimo
